#include "adanorm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adanorm {

namespace {

void validate_common(const BoundInputs& in) {
  if (!(in.b0 > 0.0)) throw std::invalid_argument("b0 must be positive");
  if (!(in.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(in.L > 0.0)) throw std::invalid_argument("L must be positive");
  if (in.sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
  if (in.gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
  if (in.delta_F < 0.0)
    throw std::invalid_argument("delta_F must be non-negative");
  if (in.N < 1) throw std::invalid_argument("N must be >= 1");
}

}  // namespace

BoundResult theorem21_bound(const BoundInputs& in) {
  validate_common(in);
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(in.gamma > 0.0 || in.sigma > 0.0))
    throw std::invalid_argument("theorem 2.1 needs gamma > 0 or sigma > 0");

  const double n = static_cast<double>(in.N);
  const double q =
      in.delta_F / in.eta +
      (4.0 * in.sigma + in.eta * in.L) / 2.0 *
          std::log(20.0 * n * (in.gamma * in.gamma + in.sigma * in.sigma) /
                       (in.b0 * in.b0) +
                   10.0);
  const double d32 = std::pow(in.delta, 1.5);
  const double bound1 =
      (2.0 * in.b0 / n + 2.0 * std::sqrt(2.0) * (in.gamma + in.sigma) /
                             std::sqrt(n)) *
      q / d32;
  const double bound2 =
      (8.0 * q / in.delta + 2.0 * in.b0) * 4.0 * q / (n * in.delta) +
      8.0 * q * in.sigma / (d32 * std::sqrt(n));

  BoundResult r;
  r.components["Q"] = q;
  r.components["bound1"] = bound1;
  r.components["bound2"] = bound2;
  if (bound1 <= bound2) {
    r.value = bound1;
    r.branch = "bound1";
  } else {
    r.value = bound2;
    r.branch = "bound2";
  }
  return r;
}

BoundResult theorem22_iterations(const BoundInputs& in) {
  validate_common(in);
  if (!(in.eps > 0.0)) throw std::invalid_argument("eps must be positive");

  BoundResult r;
  const double eta_l = in.eta * in.L;
  if (in.b0 >= eta_l) {
    const double quad = 4.0 * in.delta_F * in.delta_F / (in.eta * in.eta);
    const double linear = 2.0 * in.b0 * in.delta_F / in.eta;
    r.branch = "case1";
    r.components["term_quadratic"] = quad;
    r.components["term_linear"] = linear;
    r.value = 1.0 + std::ceil((quad + linear) / in.eps);
  } else {
    const double c_b0 = 1.0 + 2.0 * std::log(eta_l / in.b0);
    const double smooth = 2.0 * in.L * in.delta_F;
    const double square_term = 2.0 * in.delta_F / in.eta + eta_l * c_b0;
    const double square = square_term * square_term;
    const double tail = eta_l * eta_l * (1.0 + c_b0);
    r.branch = "case2";
    r.components["C_b0"] = c_b0;
    r.components["term_smooth"] = smooth;
    r.components["term_square"] = square;
    r.components["term_tail"] = tail;
    r.components["b0_sq"] = in.b0 * in.b0;
    r.value =
        1.0 + std::ceil((smooth + square + tail - in.b0 * in.b0) / in.eps);
  }
  return r;
}

GdIterations classical_gd_iterations(double b, double L, double delta_F,
                                     double eps) {
  if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
  if (delta_F < 0.0) throw std::invalid_argument("delta_F must be non-negative");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  GdIterations r;
  if (b >= L) {
    r.kind = GdIterations::Kind::Count;
    r.count = static_cast<long>(std::ceil(2.0 * b * delta_F / eps));
  } else if (b <= L / 2.0) {
    r.kind = GdIterations::Kind::Divergent;
  } else {
    r.kind = GdIterations::Kind::Unspecified;
  }
  return r;
}

double ghadimi_lan_bound(const BoundInputs& in) {
  validate_common(in);
  if (!(in.delta > 0.0 && in.delta <= 1.0))
    throw std::invalid_argument("delta must lie in (0, 1]");
  const double n = static_cast<double>(in.N);
  return 2.0 * in.L * in.delta_F / (n * in.delta) +
         (in.L + 2.0 * in.delta_F) * in.sigma / (in.delta * std::sqrt(n));
}

LogSumCheckResult lemma_logsum_check(const std::vector<double>& a) {
  if (a.empty()) throw std::invalid_argument("sequence must be non-empty");
  if (!(a.front() >= 1.0))
    throw std::invalid_argument("first entry must be >= 1");
  LogSumCheckResult r;
  double prefix = 0.0;
  for (double v : a) {
    if (v < 0.0) throw std::invalid_argument("entries must be non-negative");
    prefix += v;
    r.lhs += v / prefix;
  }
  r.rhs = std::log(prefix) + 1.0;
  r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + std::abs(r.rhs));
  return r;
}

Lemma41Result lemma41_check(double b0, double C, double eps,
                            const std::vector<double>& a) {
  if (!(b0 > 0.0)) throw std::invalid_argument("b0 must be positive");
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("eps must lie in (0, 1]");
  const double gap = C * C - b0 * b0;
  const long n = gap > 0.0 ? static_cast<long>(std::ceil(gap / eps)) + 1 : 0;
  if (static_cast<long>(a.size()) < n)
    throw std::invalid_argument("sequence shorter than required N");
  double b_sq = b0 * b0;
  double min_a = std::numeric_limits<double>::infinity();
  for (long k = 0; k < n; ++k) {
    if (a[k] < 0.0) throw std::invalid_argument("entries must be non-negative");
    b_sq += a[k];
    min_a = std::min(min_a, a[k]);
  }
  const bool min_ok = n > 0 && min_a <= eps;
  const bool crossed = b_sq >= C * C;
  Lemma41Result r;
  r.steps = n;
  r.holds = min_ok || crossed;
  using W = Lemma41Result::Which;
  r.which = min_ok && crossed ? W::Both
            : min_ok          ? W::MinLeqEps
            : crossed         ? W::Crossed
                              : W::Neither;
  return r;
}

Lemma42Result lemma42_empirical_check(const RunTrace& trace, double L,
                                      double eta, double b0, double f_star) {
  if (!(L > 0.0) || !(eta > 0.0) || !(b0 > 0.0))
    throw std::invalid_argument("L, eta, b0 must be positive");
  const double threshold = eta * L;
  Lemma42Result r;
  if (b0 >= threshold) {
    // k0 = 0: the bound degenerates to F0 - F* <= F0 - F* + eta^2 L / 2.
    r.applicable = true;
    r.k0 = 0;
    r.lhs = trace.initial_loss - f_star;
    r.rhs = trace.initial_loss - f_star + eta * eta * L / 2.0;
    r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + std::abs(r.rhs));
    return r;
  }
  long k0 = -1;
  for (size_t i = 0; i < trace.checkpoints.size(); ++i) {
    if (trace.checkpoints[i].iteration != static_cast<long>(i) + 1)
      throw std::invalid_argument(
          "trace must record consecutive iterations 1, 2, 3, ...");
    if (trace.checkpoints[i].b_value >= threshold) {
      k0 = trace.checkpoints[i].iteration;
      break;
    }
  }
  if (k0 < 0) return r;  // accumulator never crossed: not applicable

  double f_prev, b_prev;
  if (k0 == 1) {
    f_prev = trace.initial_loss;
    b_prev = b0;
  } else {
    const auto& rec = trace.checkpoints[static_cast<size_t>(k0) - 2];
    f_prev = rec.loss;
    b_prev = rec.b_value;
  }
  r.applicable = true;
  r.k0 = k0;
  r.lhs = f_prev - f_star;
  r.rhs = trace.initial_loss - f_star +
          eta * eta * L / 2.0 * (1.0 + 2.0 * std::log(b_prev / b0));
  r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + std::abs(r.rhs));
  return r;
}

}  // namespace adanorm

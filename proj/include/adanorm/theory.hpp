#pragma once

#include <map>
#include <string>
#include <vector>

#include "adanorm/optimizers.hpp"

namespace adanorm {

/// Symbols entering the convergence bounds: initial accumulator b0, scale
/// eta, smoothness L, noise level sigma, uniform gradient bound gamma,
/// initial suboptimality delta_F = F(x0) - F*, failure probability delta,
/// horizon N, and stationarity target eps.
struct BoundInputs {
  double b0 = 1.0;
  double eta = 1.0;
  double L = 1.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double delta_F = 0.0;
  double delta = 0.5;
  long N = 1;
  double eps = 1e-3;
};

struct BoundResult {
  double value = 0.0;
  std::string branch;
  std::map<std::string, double> components;
};

/// High-probability bound on min_{l in [N-1]} |grad F(x_l)|^2 for the
/// stochastic scalar-accumulator method: the smaller of
///   (2 b0/N + 2 sqrt(2)(gamma+sigma)/sqrt(N)) Q / delta^(3/2)
/// and
///   (8Q/delta + 2 b0) 4Q/(N delta) + 8 Q sigma / (delta^(3/2) sqrt(N)),
/// with Q = delta_F/eta + ((4 sigma + eta L)/2) log(20 N (gamma^2+sigma^2)/b0^2 + 10).
/// Components carry Q, bound1, bound2. Natural logarithms throughout.
BoundResult theorem21_bound(const BoundInputs& in);

/// Iteration count guaranteeing min_j |grad F(x_j)|^2 <= eps for the
/// deterministic method:
///   case 1 (b0 >= eta L, boundary included):
///     N = 1 + ceil((1/eps) (4 delta_F^2/eta^2 + 2 b0 delta_F/eta))
///   case 2 (b0 < eta L), with C_b0 = 1 + 2 log(eta L / b0):
///     N = 1 + ceil((1/eps) (2 L delta_F + (2 delta_F/eta + eta L C_b0)^2
///                           + (eta L)^2 (1 + C_b0) - b0^2))
BoundResult theorem22_iterations(const BoundInputs& in);

/// Classical fixed-stepsize gradient descent, x' = x - grad/b.
struct GdIterations {
  enum class Kind { Count, Divergent, Unspecified };
  Kind kind = Kind::Count;
  long count = 0;
};

/// b >= L: at most ceil(2 b delta_F / eps) steps. b <= L/2: convergence is
/// not guaranteed (Divergent marker). The band L/2 < b < L is not covered by
/// either statement and returns an explicit Unspecified marker.
GdIterations classical_gd_iterations(double b, double L, double delta_F,
                                     double eps);

/// Reference bound for well-tuned fixed-stepsize SGD, reported side by side:
/// 2 L delta_F / (N delta) + (L + 2 delta_F) sigma / (delta sqrt(N)).
double ghadimi_lan_bound(const BoundInputs& in);

struct LogSumCheckResult {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

/// For non-negative a with a[0] >= 1:
///   sum_l a_l / (a_1 + ... + a_l)  <=  log(a_1 + ... + a_T) + 1.
/// Returns both sides and whether the inequality holds.
LogSumCheckResult lemma_logsum_check(const std::vector<double>& a);

struct Lemma41Result {
  enum class Which { MinLeqEps, Crossed, Both, Neither };
  bool holds = false;
  Which which = Which::Neither;
  long steps = 0;  // N = ceil((C^2 - b0^2)/eps) + 1, clamped at 0
};

/// Dynamical system b_{j+1}^2 = b_j^2 + a_j: after N = ceil((C^2-b0^2)/eps)+1
/// steps, either min_k a_k <= eps over k < N, or b_N >= C.
Lemma41Result lemma41_check(double b0, double C, double eps,
                            const std::vector<double>& a);

struct Lemma42Result {
  bool applicable = false;  // false when b never crossed eta L
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
  long k0 = -1;
};

/// Pre-threshold loss bound: with k0 the first index where b_{k0} >= eta L,
///   F_{k0-1} - F* <= F_0 - F* + (eta^2 L / 2)(1 + 2 log(b_{k0-1}/b_0)).
/// The trace must come from a deterministic scalar-accumulator run recorded
/// at consecutive iterations 1,2,3,... at least up to k0.
Lemma42Result lemma42_empirical_check(const RunTrace& trace, double L,
                                      double eta, double b0, double f_star);

}  // namespace adanorm

#include "adanorm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace adanorm {

namespace {

std::string describe(const std::string& what, long index, double err) {
  std::ostringstream os;
  os << what << " #" << index << ": err=" << err;
  return os.str();
}

}  // namespace

CheckReport fd_gradient_check(const Problem& problem,
                              const std::vector<Eigen::VectorXd>& points,
                              double h, double tol,
                              std::uint64_t direction_seed) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  CheckReport rep;
  rep.name = "fd-gradient:" + problem.description;
  rep.tolerance = tol;
  Rng rng(direction_seed);
  long worst_index = -1;
  for (const auto& x : points) {
    Eigen::VectorXd dir(problem.dimension);
    for (int i = 0; i < problem.dimension; ++i) dir(i) = rng.normal();
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    dir /= norm;
    const double fd =
        (problem.eval(x + h * dir) - problem.eval(x - h * dir)) / (2.0 * h);
    const double analytic = problem.grad(x).dot(dir);
    const double abs_err = std::abs(fd - analytic);
    const double rel_err = abs_err / (1.0 + std::abs(analytic));
    if (rel_err > rep.max_rel_err) worst_index = rep.samples;
    rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
    rep.max_rel_err = std::max(rep.max_rel_err, rel_err);
    ++rep.samples;
  }
  rep.passed = rep.max_rel_err <= tol;
  if (worst_index >= 0)
    rep.details.push_back(describe("point", worst_index, rep.max_rel_err));
  return rep;
}

namespace {

// Visit all ascending n-subsets of {0..m-1}.
template <typename F>
void for_each_subset(int m, int n, F&& body) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (;;) {
    body(idx);
    int i = n - 1;
    while (i >= 0 && idx[i] == m - n + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
  }
}

}  // namespace

CheckReport minibatch_expectation_check(const LeastSquaresProblem& ls, int n,
                                        const Eigen::VectorXd& x) {
  if (ls.m > 8)
    throw std::invalid_argument("exhaustive enumeration limited to m <= 8");
  if (n < 1 || n > ls.m) throw std::invalid_argument("batch size out of range");
  CheckReport rep;
  rep.name = "minibatch-expectation m=" + std::to_string(ls.m) +
             " n=" + std::to_string(n);
  rep.tolerance = 1e-12;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(ls.A.cols());
  long count = 0;
  for_each_subset(ls.m, n, [&](const std::vector<int>& subset) {
    mean += ls.minibatch_grad(subset, x);
    ++count;
  });
  mean /= static_cast<double>(count);
  const Eigen::VectorXd full = ls.grad(x);
  rep.samples = count;
  rep.max_abs_err = (mean - full).cwiseAbs().maxCoeff();
  rep.max_rel_err = rep.max_abs_err / (1.0 + full.cwiseAbs().maxCoeff());
  rep.passed = rep.max_rel_err <= rep.tolerance;
  return rep;
}

double dense_sym_eig_max(const Eigen::MatrixXd& S_in) {
  const auto k = S_in.rows();
  if (k < 1 || k > 64) throw std::invalid_argument("matrix order must be in [1, 64]");
  if (S_in.cols() != k) throw std::invalid_argument("matrix must be square");
  if ((S_in - S_in.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("matrix is not symmetric");
  Eigen::MatrixXd S = S_in;

  auto off_norm = [&] {
    double acc = 0.0;
    for (Eigen::Index p = 0; p < k; ++p)
      for (Eigen::Index q = 0; q < k; ++q)
        if (p != q) acc += S(p, q) * S(p, q);
    return std::sqrt(acc);
  };
  const double target = 1e-12 * std::max(1.0, S.norm());

  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (Eigen::Index p = 0; p < k - 1; ++p) {
      for (Eigen::Index q = p + 1; q < k; ++q) {
        const double apq = S(p, q);
        if (apq == 0.0) continue;
        const double tau = (S(q, q) - S(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index i = 0; i < k; ++i) {
          const double sip = S(i, p), siq = S(i, q);
          S(i, p) = c * sip - s * siq;
          S(i, q) = s * sip + c * siq;
        }
        for (Eigen::Index i = 0; i < k; ++i) {
          const double spi = S(p, i), sqi = S(q, i);
          S(p, i) = c * spi - s * sqi;
          S(q, i) = s * spi + c * sqi;
        }
      }
    }
  }
  return S.diagonal().maxCoeff();
}

CheckReport noise_variance_check(const Problem& problem, GradientOracle oracle,
                                 const Eigen::VectorXd& x, long draws) {
  if (draws < 10000) throw std::invalid_argument("need at least 1e4 draws");
  CheckReport rep;
  rep.samples = draws;
  const Eigen::VectorXd full = problem.grad(x);
  double mean = 0.0;
  for (long i = 0; i < draws; ++i) {
    const Eigen::VectorXd g = sample_gradient(problem, oracle, x);
    mean += (g - full).squaredNorm();
  }
  mean /= static_cast<double>(draws);

  switch (oracle.kind) {
    case GradientOracle::Kind::AdditiveGaussian: {
      const double target = oracle.sigma * oracle.sigma;
      rep.name = "noise-variance gaussian sigma=" + std::to_string(oracle.sigma);
      rep.tolerance = 0.05;
      rep.max_abs_err = std::abs(mean - target);
      rep.max_rel_err = target > 0.0 ? rep.max_abs_err / target
                                     : (mean == 0.0 ? 0.0 : 1.0);
      rep.passed = rep.max_rel_err <= rep.tolerance;
      rep.details.push_back("empirical mean |G - grad|^2 = " +
                            std::to_string(mean));
      break;
    }
    case GradientOracle::Kind::MiniBatch: {
      // Reported, not asserted: the ceiling depends on the data.
      rep.name = "noise-variance minibatch n=" + std::to_string(oracle.batch_size);
      rep.tolerance = 0.0;
      rep.max_abs_err = mean;
      rep.max_rel_err = 0.0;
      rep.passed = true;
      rep.details.push_back("empirical mean |G - grad|^2 = " +
                            std::to_string(mean));
      break;
    }
    case GradientOracle::Kind::Deterministic: {
      rep.name = "noise-variance deterministic";
      rep.tolerance = 0.0;
      rep.max_abs_err = mean;
      rep.max_rel_err = mean == 0.0 ? 0.0 : 1.0;
      rep.passed = mean == 0.0;
      break;
    }
  }
  return rep;
}

}  // namespace adanorm

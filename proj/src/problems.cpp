#include "adanorm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adanorm {

double LeastSquaresProblem::eval(const Eigen::VectorXd& x) const {
  return (A * x - y).squaredNorm() / (2.0 * m);
}

Eigen::VectorXd LeastSquaresProblem::grad(const Eigen::VectorXd& x) const {
  return A.transpose() * (A * x - y) / static_cast<double>(m);
}

Eigen::VectorXd LeastSquaresProblem::minibatch_grad(
    const std::vector<int>& row_subset, const Eigen::VectorXd& x) const {
  const int n = static_cast<int>(row_subset.size());
  if (n < 1 || n > A.rows())
    throw std::invalid_argument("batch size out of range");
  Eigen::MatrixXd B(n, A.cols());
  Eigen::VectorXd yb(n);
  for (int i = 0; i < n; ++i) {
    B.row(i) = A.row(row_subset[i]);
    yb(i) = y(row_subset[i]);
  }
  return B.transpose() * (B * x - yb) / static_cast<double>(n);
}

std::shared_ptr<const LeastSquaresProblem> make_gaussian_least_squares(
    int m, int d, std::uint64_t seed, bool consistent) {
  if (m < 1 || d < 1) throw std::invalid_argument("dimensions must be positive");
  auto ls = std::make_shared<LeastSquaresProblem>();
  ls->m = m;
  ls->A.resize(m, d);
  Rng rng(seed);
  // Fill order is part of the serialization contract: A row-major, then x*
  // (consistent) or y (inconsistent).
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) ls->A(i, j) = rng.normal();
  if (consistent) {
    Eigen::VectorXd xs(d);
    for (int j = 0; j < d; ++j) xs(j) = rng.normal();
    ls->y = ls->A * xs;
    ls->x_star = std::move(xs);
  } else {
    ls->y.resize(m);
    for (int i = 0; i < m; ++i) ls->y(i) = rng.normal();
  }
  ls->spec = LeastSquaresSpec{m, d, seed, consistent};
  return ls;
}

std::shared_ptr<const LeastSquaresProblem> make_least_squares(
    Eigen::MatrixXd A, Eigen::VectorXd y,
    std::optional<Eigen::VectorXd> x_star, int sample_count) {
  if (A.rows() < 1 || A.cols() < 1)
    throw std::invalid_argument("dimensions must be positive");
  if (A.rows() != y.size()) throw std::invalid_argument("A and y disagree");
  if (sample_count < 0) throw std::invalid_argument("sample_count must be >= 0");
  auto ls = std::make_shared<LeastSquaresProblem>();
  ls->m = sample_count > 0 ? sample_count : static_cast<int>(A.rows());
  ls->A = std::move(A);
  ls->y = std::move(y);
  ls->x_star = std::move(x_star);
  return ls;
}

Problem as_problem(std::shared_ptr<const LeastSquaresProblem> ls) {
  Problem p;
  p.dimension = static_cast<int>(ls->A.cols());
  p.eval = [ls](const Eigen::VectorXd& x) { return ls->eval(x); };
  p.grad = [ls](const Eigen::VectorXd& x) { return ls->grad(x); };
  if (ls->x_star) p.f_star = 0.0;
  p.description = "least-squares m=" + std::to_string(ls->m) +
                  " d=" + std::to_string(p.dimension);
  p.rows = std::move(ls);
  return p;
}

Problem make_log_smooth_problem(int d) {
  if (d < 1) throw std::invalid_argument("dimensions must be positive");
  Problem p;
  p.dimension = d;
  p.eval = [](const Eigen::VectorXd& x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) f += std::log1p(x(i) * x(i));
    return f;
  };
  p.grad = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      g(i) = 2.0 * x(i) / (1.0 + x(i) * x(i));
    return g;
  };
  p.f_star = 0.0;
  p.lipschitz = 2.0;
  p.gamma = std::sqrt(static_cast<double>(d));
  p.description = "log-smooth d=" + std::to_string(d);
  return p;
}

double estimate_lipschitz(const LeastSquaresProblem& ls, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const int d = static_cast<int>(ls.A.cols());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d) / std::sqrt(double(d));
  double lambda = 0.0;
  const int max_iters = 500000;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = ls.A.transpose() * (ls.A * v) / static_cast<double>(ls.m);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);  // Rayleigh quotient, |v| = 1
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

GradientOracle GradientOracle::deterministic() { return GradientOracle{}; }

GradientOracle GradientOracle::minibatch(int n, std::uint64_t seed) {
  GradientOracle o;
  o.kind = Kind::MiniBatch;
  o.batch_size = n;
  o.seed = seed;
  return o;
}

GradientOracle GradientOracle::additive_gaussian(double sigma,
                                                 std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
  GradientOracle o;
  o.kind = Kind::AdditiveGaussian;
  o.sigma = sigma;
  o.seed = seed;
  return o;
}

namespace {
constexpr std::uint64_t kOracleStream = 0x6f7261636c65ULL;  // per-draw streams

// Ascending size-n subset of {0,...,m-1}, uniform over all subsets
// (partial Fisher-Yates, then sort).
std::vector<int> draw_subset(Rng& rng, int m, int n) {
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  for (int i = 0; i < n; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}
}  // namespace

Eigen::VectorXd sample_gradient(const Problem& problem, GradientOracle& oracle,
                                const Eigen::VectorXd& x) {
  if (!x.allFinite()) throw std::invalid_argument("x must be finite");
  const std::uint64_t draw = oracle.draw_counter++;
  switch (oracle.kind) {
    case GradientOracle::Kind::Deterministic:
      return problem.grad(x);
    case GradientOracle::Kind::MiniBatch: {
      if (!problem.rows)
        throw std::invalid_argument(
            "mini-batch oracle needs a problem with sample rows");
      const auto& ls = *problem.rows;
      const int rows = static_cast<int>(ls.A.rows());
      if (oracle.batch_size < 1 || oracle.batch_size > rows)
        throw std::invalid_argument("batch size out of range");
      Rng rng(derive_seed(oracle.seed, kOracleStream, draw));
      return ls.minibatch_grad(draw_subset(rng, rows, oracle.batch_size), x);
    }
    case GradientOracle::Kind::AdditiveGaussian: {
      Eigen::VectorXd g = problem.grad(x);
      if (oracle.sigma > 0.0) {
        Rng rng(derive_seed(oracle.seed, kOracleStream, draw));
        const double scale =
            oracle.sigma / std::sqrt(static_cast<double>(problem.dimension));
        for (Eigen::Index i = 0; i < g.size(); ++i)
          g(i) += scale * rng.normal();
      }
      return g;
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd uniform01_vector(int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform01();
  return x;
}

}  // namespace adanorm

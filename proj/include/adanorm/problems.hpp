#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adanorm/rng.hpp"

namespace adanorm {

struct LeastSquaresProblem;

/// A differentiable objective with hand-coded gradient and optional known
/// constants: infimum f_star, smoothness constant, uniform gradient bound.
/// Problems are immutable after construction and safe to share across runs.
struct Problem {
  int dimension = 0;
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::optional<double> f_star;
  std::optional<double> lipschitz;
  std::optional<double> gamma;
  std::string description;
  // Set when the objective is a finite sum over sample rows; required for
  // mini-batch gradient oracles.
  std::shared_ptr<const LeastSquaresProblem> rows;
};

/// Generation recipe for a Gaussian least-squares instance. Rebuilding from
/// the same spec reproduces A, y and x* bit-identically.
struct LeastSquaresSpec {
  int m = 0;
  int d = 0;
  std::uint64_t seed = 0;
  bool consistent = true;
};

/// F(x) = (1/2m) |Ax - y|^2 with gradient A^T(Ax - y)/m.
struct LeastSquaresProblem {
  Eigen::MatrixXd A;  // m x d
  Eigen::VectorXd y;  // m
  int m = 0;
  std::optional<Eigen::VectorXd> x_star;
  std::optional<LeastSquaresSpec> spec;

  double eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  // Mean row gradient over an ascending row subset of size n:
  // B^T(Bx - y_B)/n with B the gathered rows. For the full subset this is
  // the exact same expression as grad().
  Eigen::VectorXd minibatch_grad(const std::vector<int>& row_subset,
                                 const Eigen::VectorXd& x) const;
};

/// A with i.i.d. standard normal entries; if consistent, x* i.i.d. standard
/// normal and y = A x* (so the infimum is 0), else y i.i.d. standard normal.
std::shared_ptr<const LeastSquaresProblem> make_gaussian_least_squares(
    int m, int d, std::uint64_t seed, bool consistent);

/// Wraps explicit data (tests and custom instances). `sample_count` defaults
/// to the row count of A but may be overridden, changing the 1/m scaling.
std::shared_ptr<const LeastSquaresProblem> make_least_squares(
    Eigen::MatrixXd A, Eigen::VectorXd y,
    std::optional<Eigen::VectorXd> x_star = std::nullopt,
    int sample_count = 0);

/// Generic Problem view over a least-squares instance. f_star = 0 is declared
/// only for consistent systems (planted solution present).
Problem as_problem(std::shared_ptr<const LeastSquaresProblem> ls);

/// F(x) = sum_i log(1 + x_i^2): nonconvex, smooth with L = 2, gradient
/// uniformly bounded by sqrt(d), infimum 0 at the origin.
Problem make_log_smooth_problem(int d);

/// Largest eigenvalue of A^T A / m by power iteration from a fixed start
/// vector, to relative tolerance tol. Returns 0 for a zero matrix.
double estimate_lipschitz(const LeastSquaresProblem& ls, double tol);

/// Stochastic gradient source. Sampling is a pure function of
/// (seed, draw_counter): each draw derives its own generator, so identical
/// (seed, counter) pairs reproduce identical samples regardless of host
/// parallelism or call history.
struct GradientOracle {
  enum class Kind { Deterministic, MiniBatch, AdditiveGaussian };

  Kind kind = Kind::Deterministic;
  int batch_size = 0;  // MiniBatch only
  double sigma = 0.0;  // AdditiveGaussian only
  std::uint64_t seed = 0;
  std::uint64_t draw_counter = 0;

  static GradientOracle deterministic();
  static GradientOracle minibatch(int n, std::uint64_t seed);
  static GradientOracle additive_gaussian(double sigma, std::uint64_t seed);
};

/// Draws one stochastic gradient at x and advances the oracle's draw counter
/// by exactly one. AdditiveGaussian noise is i.i.d. N(0, sigma^2/d) per
/// coordinate, so E|G - grad|^2 = sigma^2 exactly.
Eigen::VectorXd sample_gradient(const Problem& problem, GradientOracle& oracle,
                                const Eigen::VectorXd& x);

/// Uniform [0,1)^d vector from a dedicated seed (experiment initialization).
Eigen::VectorXd uniform01_vector(int d, std::uint64_t seed);

}  // namespace adanorm

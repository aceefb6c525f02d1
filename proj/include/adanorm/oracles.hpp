#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "adanorm/problems.hpp"

namespace adanorm {

/// Outcome of an independent verification check. `passed` is equivalent to
/// max_rel_err <= tolerance, where relative errors are normalized by
/// (1 + |reference value|).
struct CheckReport {
  std::string name;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  long samples = 0;
  bool passed = false;
  double tolerance = 0.0;
  std::vector<std::string> details;  // worst offenders
};

/// Central finite differences along seeded random unit directions against
/// <grad F(x), direction> at each supplied point.
CheckReport fd_gradient_check(const Problem& problem,
                              const std::vector<Eigen::VectorXd>& points,
                              double h, double tol,
                              std::uint64_t direction_seed = 12345);

/// Averages the mini-batch gradient over all C(m, n) row subsets and compares
/// with the full gradient. Refuses m > 8 (combinatorial guard).
CheckReport minibatch_expectation_check(const LeastSquaresProblem& ls, int n,
                                        const Eigen::VectorXd& x);

/// Largest eigenvalue of a symmetric matrix (k <= 64) by cyclic Jacobi
/// rotations, driving the off-diagonal norm to 1e-12 relative.
double dense_sym_eig_max(const Eigen::MatrixXd& S);

/// Empirical mean of |G - grad F(x)|^2 over `draws` samples. Asserted within
/// 5% of sigma^2 for additive-Gaussian oracles; reported (not asserted) for
/// mini-batch oracles; exact zero for deterministic ones.
CheckReport noise_variance_check(const Problem& problem, GradientOracle oracle,
                                 const Eigen::VectorXd& x, long draws);

}  // namespace adanorm

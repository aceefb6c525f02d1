#pragma once

#include <Eigen/Dense>

#include "adanorm/problems.hpp"

namespace adanorm::testutil {

// F(x) = (c/2) x^2 in one dimension, smoothness constant c.
inline Problem make_quadratic_1d(double curvature = 1.0) {
  Problem p;
  p.dimension = 1;
  p.eval = [curvature](const Eigen::VectorXd& x) {
    return 0.5 * curvature * x(0) * x(0);
  };
  p.grad = [curvature](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, curvature * x(0));
  };
  p.f_star = 0.0;
  p.lipschitz = curvature;
  p.description = "quadratic-1d c=" + std::to_string(curvature);
  return p;
}

// Axis-aligned quadratic F(x) = sum_k (c_k/2) x_k^2.
inline Problem make_diag_quadratic(Eigen::VectorXd curvatures) {
  Problem p;
  p.dimension = static_cast<int>(curvatures.size());
  auto c = std::make_shared<Eigen::VectorXd>(std::move(curvatures));
  p.eval = [c](const Eigen::VectorXd& x) {
    return 0.5 * c->cwiseProduct(x).dot(x);
  };
  p.grad = [c](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return c->cwiseProduct(x);
  };
  p.f_star = 0.0;
  p.lipschitz = c->maxCoeff();
  p.description = "diag-quadratic";
  return p;
}

inline Eigen::VectorXd scalar_vec(double v) {
  return Eigen::VectorXd::Constant(1, v);
}

}  // namespace adanorm::testutil

#include <cmath>

#include "doctest.h"

#include "adanorm/oracles.hpp"
#include "test_util.hpp"

using namespace adanorm;

TEST_CASE("finite differences pass on the smooth nonconvex problem") {
  const auto p = make_log_smooth_problem(5);
  std::vector<Eigen::VectorXd> pts;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(5);
    for (int k = 0; k < 5; ++k) x(k) = 3.0 * rng.normal();
    pts.push_back(x);
  }
  const auto rep = fd_gradient_check(p, pts, 1e-5, 1e-6);
  CHECK(rep.passed);
  CHECK(rep.samples == 100);
  CHECK(rep.max_rel_err <= 1e-6);

  // Same seed, same report.
  const auto rep2 = fd_gradient_check(p, pts, 1e-5, 1e-6);
  CHECK(rep.max_rel_err == rep2.max_rel_err);
  CHECK(rep.max_abs_err == rep2.max_abs_err);
}

TEST_CASE("finite differences are exact for quadratics and constants") {
  // Central differences have no truncation error on a quadratic; checking
  // along eigendirections of the Gram matrix keeps the arithmetic clean.
  const auto ls = make_gaussian_least_squares(20, 4, 6, true);
  const auto p = as_problem(ls);
  Eigen::MatrixXd gram = ls->A.transpose() * ls->A / 20.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(4).normalized();
  for (int it = 0; it < 5000; ++it) v = (gram * v).normalized();
  const Eigen::VectorXd x = uniform01_vector(4, 2);
  const double h = 1e-5;
  const double fd = (p.eval(x + h * v) - p.eval(x - h * v)) / (2.0 * h);
  CHECK(fd == doctest::Approx(p.grad(x).dot(v)).epsilon(1e-9));

  Problem zero;
  zero.dimension = 3;
  zero.eval = [](const Eigen::VectorXd&) { return 0.0; };
  zero.grad = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Zero(x.size());
  };
  zero.description = "constant";
  std::vector<Eigen::VectorXd> pts(10, uniform01_vector(3, 3));
  const auto rep = fd_gradient_check(zero, pts, 1e-5, 1e-6);
  CHECK(rep.passed);
  CHECK(rep.max_abs_err == 0.0);
}

TEST_CASE("subset enumeration: means, edges, and the guard") {
  // m=2, n=1: the average of the two row gradients is the full gradient.
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, -1.0, 0.5;
  Eigen::VectorXd y(2);
  y << 0.3, -0.7;
  const auto two = make_least_squares(a, y);
  CHECK(minibatch_expectation_check(*two, 1, uniform01_vector(2, 4)).passed);
  CHECK(minibatch_expectation_check(*two, 2, uniform01_vector(2, 4)).passed);

  const auto six = make_gaussian_least_squares(6, 3, 12, false);
  const auto rep = minibatch_expectation_check(*six, 3, uniform01_vector(3, 9));
  CHECK(rep.passed);
  CHECK(rep.samples == 20);  // C(6,3)

  const auto nine = make_gaussian_least_squares(9, 2, 1, true);
  CHECK_THROWS_AS(minibatch_expectation_check(*nine, 2, uniform01_vector(2, 1)),
                  std::invalid_argument);
}

TEST_CASE("jacobi eigensolver: closed forms and input checks") {
  Eigen::MatrixXd d(2, 2);
  d << 3.0, 0.0, 0.0, 1.0;
  CHECK(dense_sym_eig_max(d) == 3.0);

  Eigen::MatrixXd s(2, 2);
  s << 2.0, 1.0, 1.0, 2.0;
  CHECK(dense_sym_eig_max(s) == doctest::Approx(3.0).epsilon(1e-12));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(dense_sym_eig_max(asym), std::invalid_argument);
  CHECK_THROWS_AS(dense_sym_eig_max(Eigen::MatrixXd::Identity(65, 65)),
                  std::invalid_argument);
}

TEST_CASE("jacobi and power iteration agree on random gram matrices") {
  Rng rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(31));
    Eigen::MatrixXd b(k + 2, k);
    for (int r = 0; r < k + 2; ++r)
      for (int c = 0; c < k; ++c) b(r, c) = rng.normal();
    const auto ls = make_least_squares(b, Eigen::VectorXd::Zero(k + 2));
    const double via_power = estimate_lipschitz(*ls, 1e-12) * (k + 2);
    Eigen::MatrixXd gram = b.transpose() * b;
    gram = 0.5 * (gram + gram.transpose()).eval();
    const double via_jacobi = dense_sym_eig_max(gram);
    CHECK(std::abs(via_power - via_jacobi) <=
          1e-8 * std::max(1.0, via_jacobi));
  }
}

TEST_CASE("noise variance: exact zeros and the 5% window") {
  const auto p = make_log_smooth_problem(8);
  const Eigen::VectorXd x = uniform01_vector(8, 44);

  const auto quiet = noise_variance_check(
      p, GradientOracle::additive_gaussian(0.0, 1), x, 10000);
  CHECK(quiet.passed);
  CHECK(quiet.max_abs_err == 0.0);

  const auto rep = noise_variance_check(
      p, GradientOracle::additive_gaussian(2.0, 31337), x, 100000);
  CHECK(rep.passed);
  // sigma^2 = 4: the empirical mean sits inside [3.8, 4.2].
  CHECK(rep.max_abs_err <= 0.2);

  const auto ls = make_gaussian_least_squares(6, 3, 77, true);
  const auto full_batch = noise_variance_check(
      as_problem(ls), GradientOracle::minibatch(6, 5), uniform01_vector(3, 2),
      10000);
  CHECK(full_batch.passed);
  CHECK(full_batch.max_abs_err == 0.0);  // n = m: every draw is exact

  CHECK_THROWS_AS(noise_variance_check(
                      p, GradientOracle::additive_gaussian(1.0, 1), x, 100),
                  std::invalid_argument);
}

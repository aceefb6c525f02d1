#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adanorm/problems.hpp"

namespace adanorm {

/// Raised by step rules on non-finite input; run() converts it into a
/// diverged trace instead of crashing a sweep.
struct DivergenceError : std::runtime_error {
  long step;
  explicit DivergenceError(long step_index)
      : std::runtime_error("non-finite value at step " +
                           std::to_string(step_index)),
        step(step_index) {}
};

struct LineSearchFailure : std::runtime_error {
  explicit LineSearchFailure(double b)
      : std::runtime_error("line search exceeded b = " + std::to_string(b) +
                           " without acceptance") {}
};

// ---------------------------------------------------------------------------
// Per-algorithm state. Step functions are pure: state in, state out.
// ---------------------------------------------------------------------------

/// Scalar-accumulator rule: b' = sqrt(b^2 + |g|^2), then x' = x - (eta/b') g.
/// b is strictly positive and non-decreasing; b^2 - b0^2 equals the sum of
/// squared gradient norms consumed so far.
struct AdaGradNormState {
  Eigen::VectorXd x;
  double b = 1.0;
  double eta = 1.0;
  long step_count = 0;
};

/// Per-coordinate accumulators: b'(k) = sqrt(b(k)^2 + g(k)^2).
struct AdaGradCoordState {
  Eigen::VectorXd x;
  Eigen::VectorXd b;  // every entry > 0
  double eta = 1.0;
  long step_count = 0;
};

/// Plain SGD with fixed stepsize eta/b0 or decaying eta/(b0 sqrt(j)).
struct SgdState {
  enum class Decay { Constant, InverseSqrt };
  Eigen::VectorXd x;
  double eta = 1.0;
  double b0 = 1.0;
  Decay decay = Decay::Constant;
  long step_count = 1;  // stepsize is evaluated at j >= 1
};

/// b' = b + |g|^2 / b, then x' = x - (eta/b') g.
struct WnGradState {
  Eigen::VectorXd x;
  double b = 1.0;
  double eta = 1.0;
  long step_count = 0;
};

/// v' = beta v + (1-beta) g; b as in AdaGradNormState; x' = x - (eta/b') v'.
struct MomentumState {
  Eigen::VectorXd x;
  double b = 1.0;
  Eigen::VectorXd v;
  double beta = 0.9;
  double eta = 1.0;
  long step_count = 0;
};

/// Doubling line search: each step restarts at b0 and doubles b until
/// F(x - g/b) <= F(x) - (1/(2b)) |g|^2. `b` holds the last accepted value.
struct LineSearchState {
  Eigen::VectorXd x;
  double b = 1.0;
  double b0 = 1.0;
  long function_evals = 0;
  bool converged = false;  // gradient exactly zero
  long step_count = 0;
};

AdaGradNormState adagrad_norm_step(AdaGradNormState s, const Eigen::VectorXd& g);
AdaGradCoordState adagrad_coord_step(AdaGradCoordState s, const Eigen::VectorXd& g);
SgdState sgd_step(SgdState s, const Eigen::VectorXd& g);
WnGradState wngrad_step(WnGradState s, const Eigen::VectorXd& g);
MomentumState momentum_step(MomentumState s, const Eigen::VectorXd& g);
LineSearchState line_search_step(const Problem& problem, LineSearchState s);

// ---------------------------------------------------------------------------
// Uniform run driver.
// ---------------------------------------------------------------------------

/// Tagged algorithm configuration. Recognized names: adagrad-norm,
/// adagrad-coord, sgd-const, sgd-decay-sqrt, wngrad, gd-linesearch,
/// adagrad-norm-momentum.
struct AlgorithmConfig {
  std::string algo;
  double b0 = 1.0;
  double eta = 1.0;
  std::optional<double> beta;  // adagrad-norm-momentum only
};

const std::vector<std::string>& known_algorithms();

enum class RunStatus { Completed, ConvergedToTarget, Diverged };

std::string run_status_to_string(RunStatus status, long diverged_step);

struct CheckpointRecord {
  long iteration = 0;
  double loss = 0;
  double grad_norm_sq = 0;  // true full-gradient norm squared, recomputed
  double effective_lr = 0;
  double b_value = 0;
};

/// Realized log-sum inequality sum_k |G_k|^2 / b_{k+1}^2 <= log(b_N^2/b_0^2)+1
/// for rules with a scalar accumulator; worst coordinate for the
/// per-coordinate rule.
struct LogSumCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

struct RunTrace {
  std::string run_id;
  std::string algorithm;
  double b0 = 0;
  double eta = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Completed;
  long diverged_step = -1;
  std::vector<CheckpointRecord> checkpoints;
  // eps -> first iteration j (counting the initial point as 0) with
  // |grad F(x_j)|^2 <= eps; nullopt if never hit.
  std::map<double, std::optional<long>> first_hit;
  double initial_loss = 0;
  double initial_grad_norm_sq = 0;
  // Running minimum of the true gradient norm squared over every visited
  // iterate x_0..x_iters; tracked only when requested or when eps targets
  // are present.
  std::optional<double> min_grad_norm_sq;
  std::optional<long> min_grad_arg;
  std::optional<LogSumCheck> logsum;
  Eigen::VectorXd x_final;
  long function_evals = 0;  // line search trials
  double wall_ms = 0;
};

struct RunOptions {
  long iters = 1;
  std::vector<long> checkpoints;   // ascending, within [1, iters]
  std::vector<double> eps_targets;
  bool track_min_grad = false;     // full gradient every iteration
  bool stop_when_targets_hit = false;  // requires empty checkpoints
};

/// Executes the configured step rule for opts.iters iterations from x0,
/// sampling one gradient per step from the oracle. Divergence (any non-finite
/// gradient, iterate, or recorded value) halts the run and stamps the trace;
/// it is never thrown out of this function.
RunTrace run(const Problem& problem, GradientOracle oracle,
             const AlgorithmConfig& algo, const Eigen::VectorXd& x0,
             const RunOptions& opts);

}  // namespace adanorm

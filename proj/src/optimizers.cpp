#include "adanorm/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <variant>

namespace adanorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gradient(const Eigen::VectorXd& g, long step) {
  if (!g.allFinite()) throw DivergenceError(step);
}

double median_of(Eigen::VectorXd v) {
  const auto n = v.size();
  auto* data = v.data();
  std::nth_element(data, data + n / 2, data + n);
  double hi = data[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(data, data + n / 2 - 1, data + n / 2);
  return 0.5 * (data[n / 2 - 1] + hi);
}

}  // namespace

AdaGradNormState adagrad_norm_step(AdaGradNormState s,
                                   const Eigen::VectorXd& g) {
  check_gradient(g, s.step_count);
  const double gn2 = g.squaredNorm();
  if (!std::isfinite(gn2)) throw DivergenceError(s.step_count);
  // Accumulator first, then the move, per the update's line order.
  s.b = std::sqrt(s.b * s.b + gn2);
  s.x -= (s.eta / s.b) * g;
  ++s.step_count;
  return s;
}

AdaGradCoordState adagrad_coord_step(AdaGradCoordState s,
                                     const Eigen::VectorXd& g) {
  check_gradient(g, s.step_count);
  for (Eigen::Index k = 0; k < s.x.size(); ++k) {
    s.b(k) = std::sqrt(s.b(k) * s.b(k) + g(k) * g(k));
    s.x(k) -= (s.eta / s.b(k)) * g(k);
  }
  ++s.step_count;
  return s;
}

SgdState sgd_step(SgdState s, const Eigen::VectorXd& g) {
  check_gradient(g, s.step_count);
  if (!s.x.allFinite()) throw DivergenceError(s.step_count);
  const double stepsize =
      s.decay == SgdState::Decay::Constant
          ? s.eta / s.b0
          : s.eta / (s.b0 * std::sqrt(static_cast<double>(s.step_count)));
  s.x -= stepsize * g;
  ++s.step_count;
  return s;
}

WnGradState wngrad_step(WnGradState s, const Eigen::VectorXd& g) {
  check_gradient(g, s.step_count);
  const double gn2 = g.squaredNorm();
  if (!std::isfinite(gn2)) throw DivergenceError(s.step_count);
  s.b = s.b + gn2 / s.b;
  s.x -= (s.eta / s.b) * g;
  ++s.step_count;
  return s;
}

MomentumState momentum_step(MomentumState s, const Eigen::VectorXd& g) {
  check_gradient(g, s.step_count);
  const double gn2 = g.squaredNorm();
  if (!std::isfinite(gn2)) throw DivergenceError(s.step_count);
  s.v = s.beta * s.v + (1.0 - s.beta) * g;
  s.b = std::sqrt(s.b * s.b + gn2);
  s.x -= (s.eta / s.b) * s.v;
  ++s.step_count;
  return s;
}

LineSearchState line_search_step(const Problem& problem, LineSearchState s) {
  const Eigen::VectorXd g = problem.grad(s.x);
  check_gradient(g, s.step_count);
  const double gn2 = g.squaredNorm();
  if (gn2 == 0.0) {
    s.converged = true;
    return s;
  }
  const double fx = problem.eval(s.x);
  double b = s.b0;  // every search restarts from the configured value
  for (;;) {
    Eigen::VectorXd x_new = s.x - g / b;
    const double f_new = problem.eval(x_new);
    ++s.function_evals;
    if (f_new <= fx - gn2 / (2.0 * b)) {
      s.x = std::move(x_new);
      s.b = b;
      ++s.step_count;
      return s;
    }
    b *= 2.0;
    if (b > 1e30) throw LineSearchFailure(b);
  }
}

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {
      "adagrad-norm", "adagrad-coord",         "sgd-const", "sgd-decay-sqrt",
      "wngrad",       "gd-linesearch",         "adagrad-norm-momentum"};
  return names;
}

std::string run_status_to_string(RunStatus status, long diverged_step) {
  switch (status) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::ConvergedToTarget:
      return "converged_to_target";
    case RunStatus::Diverged:
      return "diverged(" + std::to_string(diverged_step) + ")";
  }
  return "unknown";
}

namespace {

using StateVariant =
    std::variant<AdaGradNormState, AdaGradCoordState, SgdState, WnGradState,
                 MomentumState, LineSearchState>;

StateVariant make_state(const AlgorithmConfig& cfg, const Eigen::VectorXd& x0) {
  if (!(cfg.b0 > 0.0)) throw std::invalid_argument("b0 must be positive");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (cfg.algo == "adagrad-norm")
    return AdaGradNormState{x0, cfg.b0, cfg.eta, 0};
  if (cfg.algo == "adagrad-coord")
    return AdaGradCoordState{
        x0, Eigen::VectorXd::Constant(x0.size(), cfg.b0), cfg.eta, 0};
  if (cfg.algo == "sgd-const")
    return SgdState{x0, cfg.eta, cfg.b0, SgdState::Decay::Constant, 1};
  if (cfg.algo == "sgd-decay-sqrt")
    return SgdState{x0, cfg.eta, cfg.b0, SgdState::Decay::InverseSqrt, 1};
  if (cfg.algo == "wngrad") return WnGradState{x0, cfg.b0, cfg.eta, 0};
  if (cfg.algo == "adagrad-norm-momentum") {
    const double beta = cfg.beta.value_or(0.9);
    if (!(beta >= 0.0 && beta < 1.0))
      throw std::invalid_argument("beta must lie in [0, 1)");
    return MomentumState{x0, cfg.b0, Eigen::VectorXd::Zero(x0.size()), beta,
                         cfg.eta, 0};
  }
  if (cfg.algo == "gd-linesearch")
    return LineSearchState{x0, cfg.b0, cfg.b0, 0, false, 0};
  throw std::invalid_argument("unknown algorithm: " + cfg.algo);
}

const Eigen::VectorXd& state_x(const StateVariant& v) {
  return std::visit([](const auto& s) -> const Eigen::VectorXd& { return s.x; },
                    v);
}

double state_effective_lr(const StateVariant& v) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdaGradNormState> ||
                      std::is_same_v<T, WnGradState> ||
                      std::is_same_v<T, MomentumState>) {
          return s.eta / s.b;
        } else if constexpr (std::is_same_v<T, AdaGradCoordState>) {
          return median_of(s.eta * s.b.cwiseInverse());
        } else if constexpr (std::is_same_v<T, SgdState>) {
          const long j = std::max<long>(1, s.step_count - 1);  // last step used
          return s.decay == SgdState::Decay::Constant
                     ? s.eta / s.b0
                     : s.eta / (s.b0 * std::sqrt(static_cast<double>(j)));
        } else {
          return 1.0 / s.b;  // line search has unit scale
        }
      },
      v);
}

double state_b_value(const StateVariant& v) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdaGradNormState> ||
                      std::is_same_v<T, WnGradState> ||
                      std::is_same_v<T, MomentumState> ||
                      std::is_same_v<T, LineSearchState>) {
          return s.b;
        } else if constexpr (std::is_same_v<T, AdaGradCoordState>) {
          return median_of(s.b);
        } else {
          const long j = std::max<long>(1, s.step_count - 1);
          return s.decay == SgdState::Decay::Constant
                     ? s.b0
                     : s.b0 * std::sqrt(static_cast<double>(j));
        }
      },
      v);
}

}  // namespace

RunTrace run(const Problem& problem, GradientOracle oracle,
             const AlgorithmConfig& algo, const Eigen::VectorXd& x0,
             const RunOptions& opts) {
  if (opts.iters < 1) throw std::invalid_argument("iters must be >= 1");
  for (size_t i = 0; i < opts.checkpoints.size(); ++i) {
    const long c = opts.checkpoints[i];
    if (c < 1 || c > opts.iters)
      throw std::invalid_argument("checkpoints must lie in [1, iters]");
    if (i > 0 && c <= opts.checkpoints[i - 1])
      throw std::invalid_argument("checkpoints must be strictly ascending");
  }
  for (double eps : opts.eps_targets)
    if (!(eps > 0.0)) throw std::invalid_argument("eps targets must be positive");
  if (opts.stop_when_targets_hit && !opts.checkpoints.empty())
    throw std::invalid_argument(
        "early stop is incompatible with checkpoint recording");
  if (x0.size() != problem.dimension)
    throw std::invalid_argument("x0 dimension mismatch");
  if (!x0.allFinite()) throw std::invalid_argument("x0 must be finite");
  const bool is_line_search = algo.algo == "gd-linesearch";
  if (is_line_search && oracle.kind != GradientOracle::Kind::Deterministic)
    throw std::invalid_argument(
        "gd-linesearch requires a deterministic oracle");

  StateVariant state = make_state(algo, x0);

  RunTrace trace;
  trace.algorithm = algo.algo;
  trace.b0 = algo.b0;
  trace.eta = algo.eta;
  trace.seed = oracle.seed;
  trace.initial_loss = problem.eval(x0);
  trace.initial_grad_norm_sq = problem.grad(x0).squaredNorm();

  const bool need_full = opts.track_min_grad || !opts.eps_targets.empty();
  for (double eps : opts.eps_targets) trace.first_hit[eps] = std::nullopt;

  auto note_full_gradient = [&](long iteration, double gn2) {
    if (!trace.min_grad_norm_sq || gn2 < *trace.min_grad_norm_sq) {
      trace.min_grad_norm_sq = gn2;
      trace.min_grad_arg = iteration;
    }
    for (auto& [eps, hit] : trace.first_hit)
      if (!hit && gn2 <= eps) hit = iteration;
  };
  auto all_targets_hit = [&] {
    for (const auto& [eps, hit] : trace.first_hit)
      if (!hit) return false;
    return !trace.first_hit.empty();
  };

  if (need_full) note_full_gradient(0, trace.initial_grad_norm_sq);

  // Realized log-sum bookkeeping: scalar lhs for scalar-accumulator rules,
  // per-coordinate lhs for the coordinate rule.
  const bool scalar_accumulator = algo.algo == "adagrad-norm" ||
                                  algo.algo == "wngrad" ||
                                  algo.algo == "adagrad-norm-momentum";
  const bool coord_accumulator = algo.algo == "adagrad-coord";
  double logsum_lhs = 0.0;
  Eigen::VectorXd coord_logsum_lhs;
  if (coord_accumulator)
    coord_logsum_lhs = Eigen::VectorXd::Zero(problem.dimension);

  const auto t_start = std::chrono::steady_clock::now();
  size_t next_checkpoint = 0;
  const bool early_stop = opts.stop_when_targets_hit;
  bool stopped_early = false;

  for (long j = 1; j <= opts.iters; ++j) {
    try {
      if (is_line_search) {
        auto& st = std::get<LineSearchState>(state);
        st = line_search_step(problem, st);
        trace.function_evals = st.function_evals;
      } else {
        Eigen::VectorXd g = sample_gradient(problem, oracle, state_x(state));
        const double gn2 = g.squaredNorm();
        if (!g.allFinite() || !std::isfinite(gn2)) throw DivergenceError(j);
        std::visit(
            [&](auto& st) {
              using T = std::decay_t<decltype(st)>;
              if constexpr (std::is_same_v<T, AdaGradNormState>)
                st = adagrad_norm_step(std::move(st), g);
              else if constexpr (std::is_same_v<T, AdaGradCoordState>)
                st = adagrad_coord_step(std::move(st), g);
              else if constexpr (std::is_same_v<T, SgdState>)
                st = sgd_step(std::move(st), g);
              else if constexpr (std::is_same_v<T, WnGradState>)
                st = wngrad_step(std::move(st), g);
              else if constexpr (std::is_same_v<T, MomentumState>)
                st = momentum_step(std::move(st), g);
            },
            state);
        if (scalar_accumulator) {
          const double b_after = std::visit(
              [](const auto& st) -> double {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, AdaGradNormState> ||
                              std::is_same_v<T, WnGradState> ||
                              std::is_same_v<T, MomentumState>)
                  return st.b;
                else
                  return 1.0;
              },
              state);
          logsum_lhs += gn2 / (b_after * b_after);
        } else if (coord_accumulator) {
          const auto& st = std::get<AdaGradCoordState>(state);
          for (Eigen::Index k = 0; k < g.size(); ++k)
            coord_logsum_lhs(k) += g(k) * g(k) / (st.b(k) * st.b(k));
        }
      }
    } catch (const DivergenceError&) {
      trace.status = RunStatus::Diverged;
      trace.diverged_step = j;
      break;
    } catch (const LineSearchFailure&) {
      // A sweep must survive; an unacceptable step is recorded like a blow-up.
      trace.status = RunStatus::Diverged;
      trace.diverged_step = j;
      break;
    }

    const Eigen::VectorXd& x = state_x(state);
    if (!x.allFinite()) {
      trace.status = RunStatus::Diverged;
      trace.diverged_step = j;
      break;
    }

    double true_grad_norm_sq = -1.0;
    if (need_full) {
      true_grad_norm_sq = problem.grad(x).squaredNorm();
      if (!std::isfinite(true_grad_norm_sq)) {
        trace.status = RunStatus::Diverged;
        trace.diverged_step = j;
        break;
      }
      note_full_gradient(j, true_grad_norm_sq);
    }

    if (next_checkpoint < opts.checkpoints.size() &&
        opts.checkpoints[next_checkpoint] == j) {
      CheckpointRecord rec;
      rec.iteration = j;
      rec.loss = problem.eval(x);
      rec.grad_norm_sq = true_grad_norm_sq >= 0.0
                             ? true_grad_norm_sq
                             : problem.grad(x).squaredNorm();
      rec.effective_lr = state_effective_lr(state);
      rec.b_value = state_b_value(state);
      if (!std::isfinite(rec.loss) || !std::isfinite(rec.grad_norm_sq)) {
        trace.status = RunStatus::Diverged;
        trace.diverged_step = j;
        break;
      }
      trace.checkpoints.push_back(rec);
      ++next_checkpoint;
    }

    if (early_stop && all_targets_hit()) {
      stopped_early = true;
      break;
    }
  }

  const auto t_end = std::chrono::steady_clock::now();
  trace.wall_ms =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();

  // Checkpoints at or past a divergence are reported with the inf sentinel.
  if (trace.status == RunStatus::Diverged) {
    for (; next_checkpoint < opts.checkpoints.size(); ++next_checkpoint) {
      trace.checkpoints.push_back(CheckpointRecord{
          opts.checkpoints[next_checkpoint], kInf, kInf, kInf, kInf});
    }
  }

  if (trace.status != RunStatus::Diverged) {
    trace.status = (stopped_early || all_targets_hit())
                       ? RunStatus::ConvergedToTarget
                       : RunStatus::Completed;
    if (trace.first_hit.empty()) trace.status = RunStatus::Completed;
  }

  if (scalar_accumulator) {
    const double b_final = std::visit(
        [](const auto& st) -> double {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, AdaGradNormState> ||
                        std::is_same_v<T, WnGradState> ||
                        std::is_same_v<T, MomentumState>)
            return st.b;
          else
            return 1.0;
        },
        state);
    LogSumCheck check;
    check.lhs = logsum_lhs;
    check.rhs = 2.0 * std::log(b_final / algo.b0) + 1.0;
    check.holds = check.lhs <= check.rhs + 1e-12 * (1.0 + std::abs(check.rhs));
    trace.logsum = check;
  } else if (coord_accumulator) {
    const auto& st = std::get<AdaGradCoordState>(state);
    LogSumCheck worst;
    double worst_margin = -kInf;
    for (Eigen::Index k = 0; k < st.b.size(); ++k) {
      const double rhs = 2.0 * std::log(st.b(k) / algo.b0) + 1.0;
      const double margin = coord_logsum_lhs(k) - rhs;
      if (margin > worst_margin) {
        worst_margin = margin;
        worst = LogSumCheck{coord_logsum_lhs(k), rhs, false};
      }
    }
    worst.holds = worst.lhs <= worst.rhs + 1e-12 * (1.0 + std::abs(worst.rhs));
    trace.logsum = worst;
  }

  trace.x_final = state_x(state);
  return trace;
}

}  // namespace adanorm

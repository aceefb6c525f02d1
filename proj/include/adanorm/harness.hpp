#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "adanorm/optimizers.hpp"
#include "adanorm/problems.hpp"

namespace adanorm {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem recipe as exchanged over JSON: {"kind", "m", "d", "seed",
/// "consistent"}. For kind "log-smooth" only d (and the seed, which roots the
/// experiment's derived streams) apply.
struct ProblemSpec {
  std::string kind = "least-squares";  // or "log-smooth"
  int m = 2000;
  int d = 1000;
  std::uint64_t seed = 1;
  bool consistent = true;
};

Problem make_problem(const ProblemSpec& spec);
nlohmann::json problem_spec_to_json(const ProblemSpec& spec);
ProblemSpec problem_spec_from_json(const nlohmann::json& j);

struct OracleSpec {
  GradientOracle::Kind kind = GradientOracle::Kind::Deterministic;
  int batch = 0;      // minibatch
  double sigma = 0.0;  // gauss
};

/// Algorithm entry of a sweep; b0 comes from the grid and eta from the
/// policy, so only the name and optional momentum parameter live here.
struct AlgorithmSpec {
  std::string algo;
  std::optional<double> beta;
};

struct B0Grid {
  double lo = 1e-3;
  double hi = 1e5;
  int count = 25;
  enum class Scale { Log, Linear } scale = Scale::Log;
  std::vector<double> points() const;
};

struct EtaPolicy {
  enum class Kind { Fixed, FromInitialLoss } kind = Kind::Fixed;
  double value = 1.0;
};

struct SweepConfig {
  ProblemSpec problem;
  OracleSpec oracle;
  std::vector<AlgorithmSpec> algorithms;
  B0Grid b0_grid;
  EtaPolicy eta_policy;
  long iters = 5000;
  std::vector<long> checkpoints = {10, 2000, 5000};
  std::vector<double> eps_targets;
  int num_seeds = 5;
  std::string out_path;
  int workers = 0;  // 0: hardware concurrency
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json sweep_config_to_json(const SweepConfig& cfg);

/// Standalone algorithm configuration: {"algo", "b0", "eta", "beta"?}.
nlohmann::json algorithm_config_to_json(const AlgorithmConfig& cfg);
AlgorithmConfig algorithm_config_from_json(const nlohmann::json& j);

/// Executes |algorithms| x |grid| x num_seeds runs. All algorithms at a given
/// seed share the same x0; eta is resolved once per seed under
/// FromInitialLoss. Individual divergences are recorded in their traces and
/// never abort the sweep. Results are independent of the worker count.
std::vector<RunTrace> run_sweep(const SweepConfig& cfg);

/// One row per (trace, checkpoint), sorted by (algorithm, b0, seed,
/// iteration); floats as shortest round-trip decimals, divergence sentinel
/// "inf"; header always present.
std::string traces_to_csv(const std::vector<RunTrace>& traces);
void write_csv(const std::vector<RunTrace>& traces, const std::string& path);

/// Inverse of traces_to_csv for the per-checkpoint fields.
std::vector<RunTrace> parse_csv(const std::string& csv);

struct RobustRange {
  std::string algorithm;
  // Widest contiguous b0 interval where no seed diverged and the final
  // checkpoint's median grad_norm_sq is within 10x of the algorithm's best.
  std::optional<std::pair<double, double>> range;
  int points = 0;  // grid points inside the range
};

struct SweepSummary {
  // (algorithm, checkpoint iteration) -> [(b0, median grad_norm_sq)]
  std::map<std::pair<std::string, long>, std::vector<std::pair<double, double>>>
      curves;
  std::vector<RobustRange> robust_ranges;
  std::map<std::string, double> total_wall_ms;
};

SweepSummary summarize(const std::vector<RunTrace>& traces);
std::string format_summary(const SweepSummary& summary);

nlohmann::json trace_to_json(const RunTrace& trace);

}  // namespace adanorm

#include "adanorm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace adanorm {

namespace {

// Stream tags rooting the per-seed derived streams.
constexpr std::uint64_t kStreamX0 = 0x78305f696e697400ULL;
constexpr std::uint64_t kStreamOracle = 0x6f7261636c652100ULL;

void check_keys(const nlohmann::json& j, const char* ctx,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError(std::string(ctx) + " must be a JSON object");
  for (const auto& el : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (el.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" + el.key() + "' in " + ctx);
  }
}

const nlohmann::json& require(const nlohmann::json& j, const char* ctx,
                              const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string("missing key '") + key + "' in " + ctx);
  return *it;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem spec
// ---------------------------------------------------------------------------

Problem make_problem(const ProblemSpec& spec) {
  if (spec.kind == "least-squares") {
    if (spec.m < 1 || spec.d < 1)
      throw ConfigError("least-squares needs positive m and d");
    return as_problem(
        make_gaussian_least_squares(spec.m, spec.d, spec.seed, spec.consistent));
  }
  if (spec.kind == "log-smooth") {
    if (spec.d < 1) throw ConfigError("log-smooth needs positive d");
    return make_log_smooth_problem(spec.d);
  }
  throw ConfigError("unknown problem kind: " + spec.kind);
}

nlohmann::json problem_spec_to_json(const ProblemSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind;
  if (spec.kind == "least-squares") {
    j["m"] = spec.m;
    j["d"] = spec.d;
    j["seed"] = spec.seed;
    j["consistent"] = spec.consistent;
  } else {
    j["d"] = spec.d;
    j["seed"] = spec.seed;
  }
  return j;
}

ProblemSpec problem_spec_from_json(const nlohmann::json& j) {
  check_keys(j, "problem", {"kind", "m", "d", "seed", "consistent"});
  ProblemSpec spec;
  spec.kind = require(j, "problem", "kind").get<std::string>();
  if (spec.kind == "least-squares") {
    spec.m = require(j, "problem", "m").get<int>();
    spec.d = require(j, "problem", "d").get<int>();
  } else if (spec.kind == "log-smooth") {
    if (j.contains("m") || j.contains("consistent"))
      throw ConfigError("log-smooth accepts only kind, d, seed");
    spec.d = require(j, "problem", "d").get<int>();
  } else {
    throw ConfigError("unknown problem kind: " + spec.kind);
  }
  spec.seed = j.value("seed", std::uint64_t{1});
  spec.consistent = j.value("consistent", true);
  return spec;
}

// ---------------------------------------------------------------------------
// Sweep config
// ---------------------------------------------------------------------------

std::vector<double> B0Grid::points() const {
  if (count < 1) throw ConfigError("b0_grid count must be >= 1");
  if (!(lo > 0.0) || !(hi > 0.0))
    throw ConfigError("b0_grid must be strictly positive");
  if (hi < lo) throw ConfigError("b0_grid requires lo <= hi");
  std::vector<double> pts;
  pts.reserve(count);
  if (count == 1) {
    pts.push_back(lo);
    return pts;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    if (scale == Scale::Log)
      pts.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
    else
      pts.push_back(lo + t * (hi - lo));
  }
  return pts;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  check_keys(j, "config",
             {"problem", "oracle", "algorithms", "b0_grid", "eta_policy",
              "iters", "checkpoints", "eps_targets", "num_seeds", "out_path",
              "workers"});
  SweepConfig cfg;
  cfg.problem = problem_spec_from_json(require(j, "config", "problem"));

  const auto& jo = require(j, "config", "oracle");
  check_keys(jo, "oracle", {"kind", "batch", "sigma"});
  const auto okind = require(jo, "oracle", "kind").get<std::string>();
  if (okind == "det") {
    cfg.oracle.kind = GradientOracle::Kind::Deterministic;
    if (jo.contains("batch") || jo.contains("sigma"))
      throw ConfigError("det oracle takes no parameters");
  } else if (okind == "minibatch") {
    cfg.oracle.kind = GradientOracle::Kind::MiniBatch;
    cfg.oracle.batch = require(jo, "oracle", "batch").get<int>();
    if (jo.contains("sigma"))
      throw ConfigError("minibatch oracle takes no sigma");
  } else if (okind == "gauss") {
    cfg.oracle.kind = GradientOracle::Kind::AdditiveGaussian;
    cfg.oracle.sigma = require(jo, "oracle", "sigma").get<double>();
    if (cfg.oracle.sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (jo.contains("batch")) throw ConfigError("gauss oracle takes no batch");
  } else {
    throw ConfigError("unknown oracle kind: " + okind);
  }

  const auto& ja = require(j, "config", "algorithms");
  if (!ja.is_array() || ja.empty())
    throw ConfigError("algorithms must be a non-empty array");
  for (const auto& entry : ja) {
    check_keys(entry, "algorithm", {"algo", "beta"});
    AlgorithmSpec spec;
    spec.algo = require(entry, "algorithm", "algo").get<std::string>();
    const auto& names = known_algorithms();
    if (std::find(names.begin(), names.end(), spec.algo) == names.end())
      throw ConfigError("unknown algorithm: " + spec.algo);
    if (entry.contains("beta")) spec.beta = entry["beta"].get<double>();
    cfg.algorithms.push_back(std::move(spec));
  }

  const auto& jg = require(j, "config", "b0_grid");
  check_keys(jg, "b0_grid", {"lo", "hi", "count", "scale"});
  cfg.b0_grid.lo = require(jg, "b0_grid", "lo").get<double>();
  cfg.b0_grid.hi = require(jg, "b0_grid", "hi").get<double>();
  cfg.b0_grid.count = require(jg, "b0_grid", "count").get<int>();
  const auto scale = jg.value("scale", std::string("log"));
  if (scale == "log")
    cfg.b0_grid.scale = B0Grid::Scale::Log;
  else if (scale == "linear")
    cfg.b0_grid.scale = B0Grid::Scale::Linear;
  else
    throw ConfigError("b0_grid scale must be 'log' or 'linear'");

  const auto& je = require(j, "config", "eta_policy");
  check_keys(je, "eta_policy", {"kind", "value"});
  const auto ekind = require(je, "eta_policy", "kind").get<std::string>();
  if (ekind == "fixed") {
    cfg.eta_policy.kind = EtaPolicy::Kind::Fixed;
    cfg.eta_policy.value = require(je, "eta_policy", "value").get<double>();
    if (!(cfg.eta_policy.value > 0.0))
      throw ConfigError("eta must be positive");
  } else if (ekind == "from-initial-loss") {
    cfg.eta_policy.kind = EtaPolicy::Kind::FromInitialLoss;
    if (je.contains("value"))
      throw ConfigError("from-initial-loss takes no value");
  } else {
    throw ConfigError("unknown eta policy: " + ekind);
  }

  cfg.iters = require(j, "config", "iters").get<long>();
  cfg.checkpoints = require(j, "config", "checkpoints").get<std::vector<long>>();
  if (j.contains("eps_targets"))
    cfg.eps_targets = j["eps_targets"].get<std::vector<double>>();
  cfg.num_seeds = j.value("num_seeds", 5);
  cfg.out_path = j.value("out_path", std::string{});
  cfg.workers = j.value("workers", 0);
  return cfg;
}

nlohmann::json sweep_config_to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["problem"] = problem_spec_to_json(cfg.problem);
  nlohmann::json jo;
  switch (cfg.oracle.kind) {
    case GradientOracle::Kind::Deterministic:
      jo["kind"] = "det";
      break;
    case GradientOracle::Kind::MiniBatch:
      jo["kind"] = "minibatch";
      jo["batch"] = cfg.oracle.batch;
      break;
    case GradientOracle::Kind::AdditiveGaussian:
      jo["kind"] = "gauss";
      jo["sigma"] = cfg.oracle.sigma;
      break;
  }
  j["oracle"] = jo;
  j["algorithms"] = nlohmann::json::array();
  for (const auto& a : cfg.algorithms) {
    nlohmann::json entry{{"algo", a.algo}};
    if (a.beta) entry["beta"] = *a.beta;
    j["algorithms"].push_back(entry);
  }
  j["b0_grid"] = {{"lo", cfg.b0_grid.lo},
                  {"hi", cfg.b0_grid.hi},
                  {"count", cfg.b0_grid.count},
                  {"scale", cfg.b0_grid.scale == B0Grid::Scale::Log
                                ? "log"
                                : "linear"}};
  if (cfg.eta_policy.kind == EtaPolicy::Kind::Fixed)
    j["eta_policy"] = {{"kind", "fixed"}, {"value", cfg.eta_policy.value}};
  else
    j["eta_policy"] = {{"kind", "from-initial-loss"}};
  j["iters"] = cfg.iters;
  j["checkpoints"] = cfg.checkpoints;
  j["eps_targets"] = cfg.eps_targets;
  j["num_seeds"] = cfg.num_seeds;
  j["out_path"] = cfg.out_path;
  if (cfg.workers > 0) j["workers"] = cfg.workers;
  return j;
}

nlohmann::json algorithm_config_to_json(const AlgorithmConfig& cfg) {
  nlohmann::json j{{"algo", cfg.algo}, {"b0", cfg.b0}, {"eta", cfg.eta}};
  if (cfg.beta) j["beta"] = *cfg.beta;
  return j;
}

AlgorithmConfig algorithm_config_from_json(const nlohmann::json& j) {
  check_keys(j, "algorithm config", {"algo", "b0", "eta", "beta"});
  AlgorithmConfig cfg;
  cfg.algo = require(j, "algorithm config", "algo").get<std::string>();
  const auto& names = known_algorithms();
  if (std::find(names.begin(), names.end(), cfg.algo) == names.end())
    throw ConfigError("unknown algorithm: " + cfg.algo);
  cfg.b0 = require(j, "algorithm config", "b0").get<double>();
  cfg.eta = require(j, "algorithm config", "eta").get<double>();
  if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
  return cfg;
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

std::vector<RunTrace> run_sweep(const SweepConfig& cfg) {
  // Every config error must fire before any run starts.
  const Problem problem = make_problem(cfg.problem);
  const std::vector<double> grid = cfg.b0_grid.points();
  if (cfg.num_seeds < 1) throw ConfigError("num_seeds must be >= 1");
  if (cfg.iters < 1) throw ConfigError("iters must be >= 1");
  for (size_t i = 0; i < cfg.checkpoints.size(); ++i) {
    if (cfg.checkpoints[i] < 1 || cfg.checkpoints[i] > cfg.iters)
      throw ConfigError("checkpoints must lie in [1, iters]");
    if (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
      throw ConfigError("checkpoints must be strictly ascending");
  }
  if (cfg.algorithms.empty()) throw ConfigError("no algorithms configured");
  for (const auto& a : cfg.algorithms) {
    if (a.algo == "gd-linesearch" &&
        cfg.oracle.kind != GradientOracle::Kind::Deterministic)
      throw ConfigError("gd-linesearch requires the deterministic oracle");
  }
  if (cfg.oracle.kind == GradientOracle::Kind::MiniBatch) {
    if (cfg.problem.kind != "least-squares")
      throw ConfigError("minibatch oracle requires a least-squares problem");
    if (cfg.oracle.batch < 1 || cfg.oracle.batch > cfg.problem.m)
      throw ConfigError("batch size out of range");
  }
  if (cfg.eta_policy.kind == EtaPolicy::Kind::FromInitialLoss &&
      !problem.f_star)
    throw ConfigError("from-initial-loss eta needs a problem with known F*");

  // Shared initialization: one x0 per seed, identical for every algorithm.
  std::vector<Eigen::VectorXd> x0s(cfg.num_seeds);
  std::vector<double> etas(cfg.num_seeds);
  for (int s = 0; s < cfg.num_seeds; ++s) {
    x0s[s] = uniform01_vector(problem.dimension,
                              derive_seed(cfg.problem.seed, kStreamX0, s));
    etas[s] = cfg.eta_policy.kind == EtaPolicy::Kind::Fixed
                  ? cfg.eta_policy.value
                  : problem.eval(x0s[s]) - *problem.f_star;
    if (!(etas[s] > 0.0))
      throw ConfigError("resolved eta is not positive at seed " +
                        std::to_string(s));
  }

  RunOptions opts;
  opts.iters = cfg.iters;
  opts.checkpoints = cfg.checkpoints;
  opts.eps_targets = cfg.eps_targets;

  const size_t total =
      cfg.algorithms.size() * grid.size() * static_cast<size_t>(cfg.num_seeds);
  std::vector<RunTrace> traces(total);

  auto execute = [&](size_t index) {
    const size_t per_algo = grid.size() * cfg.num_seeds;
    const size_t ia = index / per_algo;
    const size_t ig = (index % per_algo) / cfg.num_seeds;
    const int s = static_cast<int>(index % cfg.num_seeds);

    AlgorithmConfig algo;
    algo.algo = cfg.algorithms[ia].algo;
    algo.beta = cfg.algorithms[ia].beta;
    algo.b0 = grid[ig];
    algo.eta = etas[s];

    GradientOracle oracle;
    oracle.kind = cfg.oracle.kind;
    oracle.batch_size = cfg.oracle.batch;
    oracle.sigma = cfg.oracle.sigma;
    oracle.seed = derive_seed(cfg.problem.seed, kStreamOracle, s);

    RunTrace trace = run(problem, oracle, algo, x0s[s], opts);
    trace.run_id = std::to_string(index);
    trace.seed = static_cast<std::uint64_t>(s);
    return trace;
  };

  int workers = cfg.workers > 0
                    ? cfg.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(total));

  if (workers == 1) {
    for (size_t i = 0; i < total; ++i) traces[i] = execute(i);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto loop = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= total) return;
        try {
          traces[i] = execute(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return traces;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

struct CsvRow {
  const RunTrace* trace;
  const CheckpointRecord* rec;
};

}  // namespace

std::string traces_to_csv(const std::vector<RunTrace>& traces) {
  std::vector<CsvRow> rows;
  for (const auto& t : traces)
    for (const auto& rec : t.checkpoints) rows.push_back({&t, &rec});
  std::sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
    if (a.trace->algorithm != b.trace->algorithm)
      return a.trace->algorithm < b.trace->algorithm;
    if (a.trace->b0 != b.trace->b0) return a.trace->b0 < b.trace->b0;
    if (a.trace->seed != b.trace->seed) return a.trace->seed < b.trace->seed;
    return a.rec->iteration < b.rec->iteration;
  });
  std::string out =
      "run_id,algorithm,b0,eta,seed,status,iteration,loss,grad_norm_sq,"
      "effective_lr,b_value\n";
  for (const auto& row : rows) {
    const auto& t = *row.trace;
    const auto& r = *row.rec;
    out += t.run_id;
    out += ',';
    out += t.algorithm;
    out += ',';
    out += format_double(t.b0);
    out += ',';
    out += format_double(t.eta);
    out += ',';
    out += std::to_string(t.seed);
    out += ',';
    out += run_status_to_string(t.status, t.diverged_step);
    out += ',';
    out += std::to_string(r.iteration);
    out += ',';
    out += format_double(r.loss);
    out += ',';
    out += format_double(r.grad_norm_sq);
    out += ',';
    out += format_double(r.effective_lr);
    out += ',';
    out += format_double(r.b_value);
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<RunTrace>& traces, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string body = traces_to_csv(traces);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<RunTrace> parse_csv(const std::string& csv) {
  std::vector<RunTrace> traces;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV: missing header");
  if (line != "run_id,algorithm,b0,eta,seed,status,iteration,loss,"
              "grad_norm_sq,effective_lr,b_value")
    throw std::runtime_error("unexpected CSV header");
  auto parse_double = [](const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) throw std::runtime_error("malformed CSV row");
    if (traces.empty() || traces.back().run_id != cells[0]) {
      RunTrace t;
      t.run_id = cells[0];
      t.algorithm = cells[1];
      t.b0 = parse_double(cells[2]);
      t.eta = parse_double(cells[3]);
      t.seed = std::stoull(cells[4]);
      const std::string& status = cells[5];
      if (status == "completed") {
        t.status = RunStatus::Completed;
      } else if (status == "converged_to_target") {
        t.status = RunStatus::ConvergedToTarget;
      } else if (status.rfind("diverged(", 0) == 0) {
        t.status = RunStatus::Diverged;
        t.diverged_step = std::stol(status.substr(9));
      } else {
        throw std::runtime_error("unknown status: " + status);
      }
      traces.push_back(std::move(t));
    }
    CheckpointRecord rec;
    rec.iteration = std::stol(cells[6]);
    rec.loss = parse_double(cells[7]);
    rec.grad_norm_sq = parse_double(cells[8]);
    rec.effective_lr = parse_double(cells[9]);
    rec.b_value = parse_double(cells[10]);
    traces.back().checkpoints.push_back(rec);
  }
  return traces;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

namespace {

double median_of_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SweepSummary summarize(const std::vector<RunTrace>& traces) {
  SweepSummary summary;
  // algorithm -> b0 -> per-checkpoint grad values and divergence flags
  struct Cell {
    std::map<long, std::vector<double>> grads;
    bool any_diverged = false;
  };
  std::map<std::string, std::map<double, Cell>> by_algo;
  long final_iter = 0;
  for (const auto& t : traces) {
    auto& cell = by_algo[t.algorithm][t.b0];
    if (t.status == RunStatus::Diverged) cell.any_diverged = true;
    for (const auto& rec : t.checkpoints) {
      cell.grads[rec.iteration].push_back(rec.grad_norm_sq);
      final_iter = std::max(final_iter, rec.iteration);
    }
    summary.total_wall_ms[t.algorithm] += t.wall_ms;
  }

  for (const auto& [algo, cells] : by_algo) {
    std::map<long, std::vector<std::pair<double, double>>> curves;
    for (const auto& [b0, cell] : cells)
      for (const auto& [iter, grads] : cell.grads)
        curves[iter].push_back({b0, median_of_sorted(grads)});
    for (auto& [iter, pts] : curves) {
      std::sort(pts.begin(), pts.end());
      summary.curves[{algo, iter}] = pts;
    }

    // Robust range over the final checkpoint's medians.
    std::vector<double> b0s;
    for (const auto& [b0, cell] : cells) b0s.push_back(b0);
    std::sort(b0s.begin(), b0s.end());
    double best = std::numeric_limits<double>::infinity();
    std::map<double, double> final_median;
    std::map<double, bool> ok_status;
    for (const auto& [b0, cell] : cells) {
      auto it = cell.grads.find(final_iter);
      const double med = it != cell.grads.end() && !it->second.empty()
                             ? median_of_sorted(it->second)
                             : std::numeric_limits<double>::infinity();
      final_median[b0] = med;
      ok_status[b0] = !cell.any_diverged;
      if (!cell.any_diverged && med < best) best = med;
    }
    RobustRange rr;
    rr.algorithm = algo;
    int best_len = 0, cur_len = 0;
    size_t cur_start = 0, best_start = 0;
    for (size_t i = 0; i < b0s.size(); ++i) {
      const bool ok = ok_status[b0s[i]] && std::isfinite(final_median[b0s[i]]) &&
                      final_median[b0s[i]] <= 10.0 * best;
      if (ok) {
        if (cur_len == 0) cur_start = i;
        ++cur_len;
        if (cur_len > best_len) {
          best_len = cur_len;
          best_start = cur_start;
        }
      } else {
        cur_len = 0;
      }
    }
    if (best_len > 0) {
      rr.range = {b0s[best_start], b0s[best_start + best_len - 1]};
      rr.points = best_len;
    }
    summary.robust_ranges.push_back(std::move(rr));
  }
  return summary;
}

std::string format_summary(const SweepSummary& summary) {
  std::ostringstream os;
  for (const auto& [key, pts] : summary.curves) {
    os << key.first << " @ iteration " << key.second << "\n";
    os << "  b0            grad_norm_sq(median)\n";
    for (const auto& [b0, g] : pts) {
      const std::string b0_text = format_double(b0);
      os << "  " << b0_text;
      for (size_t pad = b0_text.size(); pad < 15; ++pad) os << ' ';
      os << ' ' << format_double(g) << "\n";
    }
  }
  os << "robust ranges (final checkpoint, within 10x of best, no divergence)\n";
  for (const auto& rr : summary.robust_ranges) {
    os << "  " << rr.algorithm << ": ";
    if (rr.range)
      os << "[" << format_double(rr.range->first) << ", "
         << format_double(rr.range->second) << "] (" << rr.points
         << " grid points)";
    else
      os << "empty";
    os << "\n";
  }
  os << "wall time (ms)\n";
  for (const auto& [algo, ms] : summary.total_wall_ms)
    os << "  " << algo << ": " << format_double(ms) << "\n";
  return os.str();
}

nlohmann::json trace_to_json(const RunTrace& trace) {
  nlohmann::json j;
  j["run_id"] = trace.run_id;
  j["algorithm"] = trace.algorithm;
  j["b0"] = trace.b0;
  j["eta"] = trace.eta;
  j["seed"] = trace.seed;
  j["status"] = run_status_to_string(trace.status, trace.diverged_step);
  j["initial_loss"] = trace.initial_loss;
  j["initial_grad_norm_sq"] = trace.initial_grad_norm_sq;
  j["checkpoints"] = nlohmann::json::array();
  for (const auto& rec : trace.checkpoints) {
    j["checkpoints"].push_back({{"iteration", rec.iteration},
                                {"loss", rec.loss},
                                {"grad_norm_sq", rec.grad_norm_sq},
                                {"effective_lr", rec.effective_lr},
                                {"b_value", rec.b_value}});
  }
  j["first_hit"] = nlohmann::json::object();
  for (const auto& [eps, hit] : trace.first_hit) {
    if (hit)
      j["first_hit"][format_double(eps)] = *hit;
    else
      j["first_hit"][format_double(eps)] = nullptr;
  }
  if (trace.min_grad_norm_sq) {
    j["min_grad_norm_sq"] = *trace.min_grad_norm_sq;
    j["min_grad_arg"] = *trace.min_grad_arg;
  }
  if (trace.logsum) {
    j["logsum"] = {{"lhs", trace.logsum->lhs},
                   {"rhs", trace.logsum->rhs},
                   {"holds", trace.logsum->holds}};
  }
  if (trace.algorithm == "gd-linesearch")
    j["function_evals"] = trace.function_evals;
  j["wall_ms"] = trace.wall_ms;
  return j;
}

}  // namespace adanorm

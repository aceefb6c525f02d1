#include <cmath>

#include "doctest.h"

#include "adanorm/harness.hpp"

using namespace adanorm;
using nlohmann::json;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.problem = {"least-squares", 40, 8, 3, true};
  cfg.oracle.kind = GradientOracle::Kind::MiniBatch;
  cfg.oracle.batch = 5;
  cfg.algorithms = {{"adagrad-norm", {}}, {"sgd-const", {}}};
  cfg.b0_grid = {0.01, 100.0, 3, B0Grid::Scale::Log};
  cfg.eta_policy = {EtaPolicy::Kind::FromInitialLoss, 0.0};
  cfg.iters = 50;
  cfg.checkpoints = {10, 50};
  cfg.eps_targets = {};
  cfg.num_seeds = 2;
  cfg.out_path = "";
  return cfg;
}

}  // namespace

TEST_CASE("sweep cardinality and shared initialization") {
  const auto cfg = small_config();
  const auto traces = run_sweep(cfg);
  CHECK(traces.size() == 2 * 3 * 2);  // algos x grid x seeds

  // All algorithms at a given seed observe identical x0 and eta.
  std::map<std::uint64_t, std::pair<double, double>> seen;
  for (const auto& t : traces) {
    auto it = seen.find(t.seed);
    if (it == seen.end()) {
      seen[t.seed] = {t.initial_loss, t.eta};
    } else {
      CHECK(t.initial_loss == it->second.first);
      CHECK(t.eta == it->second.second);
    }
    // FromInitialLoss with F* = 0 resolves eta to the initial loss.
    CHECK(t.eta == t.initial_loss);
  }
}

TEST_CASE("sweeps are deterministic regardless of worker count") {
  auto cfg = small_config();
  cfg.workers = 1;
  const auto csv1 = traces_to_csv(run_sweep(cfg));
  cfg.workers = 2;
  const auto csv2 = traces_to_csv(run_sweep(cfg));
  cfg.workers = 7;
  const auto csv3 = traces_to_csv(run_sweep(cfg));
  CHECK(csv1 == csv2);
  CHECK(csv1 == csv3);
}

TEST_CASE("csv layout: header, row counts, sorting, sentinel") {
  CHECK(traces_to_csv({}) ==
        "run_id,algorithm,b0,eta,seed,status,iteration,loss,grad_norm_sq,"
        "effective_lr,b_value\n");

  RunTrace t;
  t.run_id = "7";
  t.algorithm = "adagrad-norm";
  t.b0 = 0.001;
  t.eta = 2.5;
  t.seed = 4;
  t.status = RunStatus::Completed;
  t.checkpoints = {{1, 0.5, 0.25, 0.1, 10.0},
                   {2, 0.25, 0.125, 0.05, 20.0},
                   {3, 0.1, 0.05, 0.025, 40.0}};
  const auto csv = traces_to_csv({t});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  CHECK(csv.find("7,adagrad-norm,0.001,2.5,4,completed,1,0.5,0.25,0.1,10") !=
        std::string::npos);

  RunTrace d = t;
  d.run_id = "8";
  d.status = RunStatus::Diverged;
  d.diverged_step = 2;
  d.checkpoints = {{1, 0.5, 0.25, 0.1, 10.0},
                   {2, INFINITY, INFINITY, INFINITY, INFINITY}};
  const auto csv2 = traces_to_csv({d});
  CHECK(csv2.find("diverged(2),2,inf,inf,inf,inf") != std::string::npos);
}

TEST_CASE("csv round-trips the checkpoint fields") {
  const auto traces = run_sweep(small_config());
  const auto csv = traces_to_csv(traces);
  const auto parsed = parse_csv(csv);

  // Align by run_id.
  std::map<std::string, const RunTrace*> originals;
  for (const auto& t : traces) originals[t.run_id] = &t;
  CHECK(parsed.size() == traces.size());
  for (const auto& p : parsed) {
    const RunTrace& o = *originals.at(p.run_id);
    CHECK(p.algorithm == o.algorithm);
    CHECK(p.b0 == o.b0);
    CHECK(p.eta == o.eta);
    CHECK(p.seed == o.seed);
    CHECK(p.status == o.status);
    CHECK(p.diverged_step == o.diverged_step);
    REQUIRE(p.checkpoints.size() == o.checkpoints.size());
    for (size_t i = 0; i < p.checkpoints.size(); ++i) {
      CHECK(p.checkpoints[i].iteration == o.checkpoints[i].iteration);
      // Shortest round-trip decimals reparse to the exact same doubles
      // (inf sentinels compare equal too).
      auto same = [](double a, double b) {
        return (std::isinf(a) && std::isinf(b) && std::signbit(a) == std::signbit(b)) || a == b;
      };
      CHECK(same(p.checkpoints[i].loss, o.checkpoints[i].loss));
      CHECK(same(p.checkpoints[i].grad_norm_sq, o.checkpoints[i].grad_norm_sq));
      CHECK(same(p.checkpoints[i].effective_lr, o.checkpoints[i].effective_lr));
      CHECK(same(p.checkpoints[i].b_value, o.checkpoints[i].b_value));
    }
  }
}

TEST_CASE("write_csv reports unwritable paths") {
  RunTrace t;
  t.run_id = "0";
  t.algorithm = "adagrad-norm";
  t.checkpoints = {{1, 0.5, 0.25, 0.1, 1.0}};
  CHECK_THROWS_AS(write_csv({t}, "/nonexistent-dir/out.csv"),
                  std::runtime_error);
}

TEST_CASE("config json: round trip and strict keys") {
  const auto cfg = small_config();
  const json j = sweep_config_to_json(cfg);
  const auto back = sweep_config_from_json(j);
  CHECK(back.problem.kind == cfg.problem.kind);
  CHECK(back.problem.m == cfg.problem.m);
  CHECK(back.oracle.batch == cfg.oracle.batch);
  CHECK(back.algorithms.size() == cfg.algorithms.size());
  CHECK(back.b0_grid.count == cfg.b0_grid.count);
  CHECK(back.iters == cfg.iters);
  CHECK(back.checkpoints == cfg.checkpoints);
  CHECK(back.num_seeds == cfg.num_seeds);

  json bad = j;
  bad["surprise"] = 1;
  CHECK_THROWS_AS(sweep_config_from_json(bad), ConfigError);

  json bad2 = j;
  bad2["problem"]["extra"] = true;
  CHECK_THROWS_AS(sweep_config_from_json(bad2), ConfigError);

  json bad3 = j;
  bad3["oracle"]["sigma"] = 1.0;  // sigma on a minibatch oracle
  CHECK_THROWS_AS(sweep_config_from_json(bad3), ConfigError);

  json bad4 = j;
  bad4["algorithms"][0]["algo"] = "sgd-momentum";  // unknown name
  CHECK_THROWS_AS(sweep_config_from_json(bad4), ConfigError);

  json bad5 = j;
  bad5.erase("iters");
  CHECK_THROWS_AS(sweep_config_from_json(bad5), ConfigError);

  // log-smooth accepts only kind, d, seed.
  json ls = j;
  ls["problem"] = {{"kind", "log-smooth"}, {"d", 5}, {"m", 3}};
  CHECK_THROWS_AS(sweep_config_from_json(ls), ConfigError);
  ls["problem"] = {{"kind", "log-smooth"}, {"d", 5}};
  ls["oracle"] = {{"kind", "det"}};
  CHECK(sweep_config_from_json(ls).problem.kind == "log-smooth");
}

TEST_CASE("algorithm config json round-trips and rejects junk") {
  AlgorithmConfig cfg{"adagrad-norm-momentum", 0.25, 3.5, 0.9};
  const auto back = algorithm_config_from_json(algorithm_config_to_json(cfg));
  CHECK(back.algo == cfg.algo);
  CHECK(back.b0 == cfg.b0);
  CHECK(back.eta == cfg.eta);
  CHECK(*back.beta == *cfg.beta);

  auto j = algorithm_config_to_json(cfg);
  j["rho"] = 0.1;
  CHECK_THROWS_AS(algorithm_config_from_json(j), ConfigError);
  CHECK_THROWS_AS(algorithm_config_from_json({{"algo", "adam"},
                                              {"b0", 1.0},
                                              {"eta", 1.0}}),
                  ConfigError);
}

TEST_CASE("problem spec json regenerates the data bit-identically") {
  ProblemSpec spec{"least-squares", 12, 5, 99, true};
  const json j = problem_spec_to_json(spec);
  const auto back = problem_spec_from_json(j);
  const auto p1 = make_problem(spec);
  const auto p2 = make_problem(back);
  CHECK(p1.rows->A == p2.rows->A);
  CHECK(p1.rows->y == p2.rows->y);
  CHECK(*p1.rows->x_star == *p2.rows->x_star);
}

TEST_CASE("b0 grids are positive and well-spaced") {
  B0Grid g{1e-3, 1e3, 7, B0Grid::Scale::Log};
  const auto pts = g.points();
  REQUIRE(pts.size() == 7);
  CHECK(pts.front() == doctest::Approx(1e-3));
  CHECK(pts.back() == doctest::Approx(1e3));
  for (size_t i = 1; i < pts.size(); ++i)
    CHECK(pts[i] / pts[i - 1] == doctest::Approx(10.0).epsilon(1e-9));

  B0Grid lin{1.0, 3.0, 3, B0Grid::Scale::Linear};
  const auto lp = lin.points();
  CHECK(lp[1] == doctest::Approx(2.0));

  B0Grid one{0.5, 0.5, 1, B0Grid::Scale::Log};
  CHECK(one.points() == std::vector<double>{0.5});

  B0Grid bad{0.0, 1.0, 3, B0Grid::Scale::Log};
  CHECK_THROWS_AS(bad.points(), ConfigError);
}

TEST_CASE("config errors fire before any run starts") {
  auto cfg = small_config();
  cfg.eta_policy = {EtaPolicy::Kind::FromInitialLoss, 0.0};
  cfg.problem.consistent = false;  // no F*: eta resolution must fail
  CHECK_THROWS_AS(run_sweep(cfg), ConfigError);

  auto cfg2 = small_config();
  cfg2.algorithms = {{"gd-linesearch", {}}};  // minibatch oracle
  CHECK_THROWS_AS(run_sweep(cfg2), ConfigError);

  auto cfg3 = small_config();
  cfg3.checkpoints = {10, 60};
  CHECK_THROWS_AS(run_sweep(cfg3), ConfigError);

  auto cfg4 = small_config();
  cfg4.oracle.batch = 100;
  CHECK_THROWS_AS(run_sweep(cfg4), ConfigError);
}

TEST_CASE("summary: robust ranges on synthetic trace sets") {
  auto make_trace = [](const std::string& algo, double b0, double final_grad,
                       bool diverged) {
    RunTrace t;
    t.run_id = algo + std::to_string(b0);
    t.algorithm = algo;
    t.b0 = b0;
    t.eta = 1.0;
    t.seed = 0;
    t.status = diverged ? RunStatus::Diverged : RunStatus::Completed;
    if (diverged) t.diverged_step = 1;
    t.checkpoints = {{100, final_grad / 2, final_grad, 0.1, b0}};
    return t;
  };

  SUBCASE("every run diverged: empty range") {
    std::vector<RunTrace> traces;
    for (double b0 : {0.1, 1.0, 10.0})
      traces.push_back(make_trace("sgd-const", b0, INFINITY, true));
    const auto summary = summarize(traces);
    REQUIRE(summary.robust_ranges.size() == 1);
    CHECK_FALSE(summary.robust_ranges[0].range.has_value());
  }

  SUBCASE("single grid point: that point or nothing") {
    const auto summary =
        summarize({make_trace("adagrad-norm", 0.5, 1e-6, false)});
    REQUIRE(summary.robust_ranges.size() == 1);
    REQUIRE(summary.robust_ranges[0].range.has_value());
    CHECK(summary.robust_ranges[0].range->first == 0.5);
    CHECK(summary.robust_ranges[0].range->second == 0.5);
    CHECK(summary.robust_ranges[0].points == 1);
  }

  SUBCASE("widest contiguous window within 10x of the best") {
    std::vector<RunTrace> traces;
    // grads: 1e-6, 5e-6, 1e-3 (breaks), 2e-6, diverged
    traces.push_back(make_trace("a", 0.1, 1e-6, false));
    traces.push_back(make_trace("a", 1.0, 5e-6, false));
    traces.push_back(make_trace("a", 10.0, 1e-3, false));
    traces.push_back(make_trace("a", 100.0, 2e-6, false));
    traces.push_back(make_trace("a", 1000.0, 1e-7, true));
    const auto summary = summarize(traces);
    REQUIRE(summary.robust_ranges[0].range.has_value());
    CHECK(summary.robust_ranges[0].range->first == 0.1);
    CHECK(summary.robust_ranges[0].range->second == 1.0);
    CHECK(summary.robust_ranges[0].points == 2);
  }
}

TEST_CASE("batch sweep: line search wins on quality, pays in evaluations") {
  SweepConfig cfg;
  cfg.problem = {"least-squares", 200, 100, 1, true};
  cfg.oracle.kind = GradientOracle::Kind::Deterministic;
  cfg.algorithms = {{"adagrad-norm", {}},
                    {"adagrad-coord", {}},
                    {"sgd-const", {}},
                    {"sgd-decay-sqrt", {}},
                    {"gd-linesearch", {}}};
  cfg.b0_grid = {1e-3, 1e4, 9, B0Grid::Scale::Log};
  cfg.eta_policy = {EtaPolicy::Kind::FromInitialLoss, 0.0};
  cfg.iters = 200;
  cfg.checkpoints = {50, 100, 200};
  cfg.num_seeds = 2;
  const auto traces = run_sweep(cfg);

  // Best grad_norm_sq over the grid, per algorithm and checkpoint.
  std::map<std::pair<std::string, long>, double> best;
  std::map<std::string, long> evals;
  for (const auto& t : traces) {
    evals[t.algorithm] += t.function_evals;
    for (const auto& rec : t.checkpoints) {
      auto key = std::make_pair(t.algorithm, rec.iteration);
      auto it = best.find(key);
      if (it == best.end() || rec.grad_norm_sq < it->second)
        best[key] = rec.grad_norm_sq;
    }
  }
  for (long cp : {50L, 100L, 200L}) {
    const double ls_best = best.at({"gd-linesearch", cp});
    for (const auto& a : cfg.algorithms) {
      if (a.algo == "gd-linesearch") continue;
      CHECK(ls_best <= best.at({a.algo, cp}));
    }
  }
  for (const auto& a : cfg.algorithms) {
    if (a.algo == "gd-linesearch") continue;
    CHECK(evals.at("gd-linesearch") > evals.at(a.algo));
  }
}

TEST_CASE("adaptive robust range strictly contains the fixed-stepsize one") {
  // Long stochastic runs on a log grid capped near 1.6x the instability
  // threshold: the scalar-accumulator rule converges at every grid point
  // while fixed-stepsize SGD survives only at the top of the grid.
  SweepConfig cfg;
  cfg.problem = {"least-squares", 200, 100, 1, true};
  cfg.oracle.kind = GradientOracle::Kind::MiniBatch;
  cfg.oracle.batch = 20;
  cfg.algorithms = {{"adagrad-norm", {}}, {"sgd-const", {}}};
  cfg.b0_grid = {1e-3, 300.0, 15, B0Grid::Scale::Log};
  cfg.eta_policy = {EtaPolicy::Kind::FromInitialLoss, 0.0};
  cfg.iters = 5000;
  cfg.checkpoints = {5000};
  cfg.num_seeds = 5;
  const auto summary = summarize(run_sweep(cfg));

  std::optional<std::pair<double, double>> ada, sgd;
  int ada_points = 0, sgd_points = 0;
  for (const auto& rr : summary.robust_ranges) {
    if (rr.algorithm == "adagrad-norm") {
      ada = rr.range;
      ada_points = rr.points;
    }
    if (rr.algorithm == "sgd-const") {
      sgd = rr.range;
      sgd_points = rr.points;
    }
  }
  REQUIRE(ada.has_value());
  REQUIRE(sgd.has_value());
  CHECK(ada->first <= sgd->first);
  CHECK(sgd->second <= ada->second);
  CHECK(ada_points > sgd_points);  // strict containment
}

TEST_CASE("trace json carries run metadata") {
  const auto traces = run_sweep(small_config());
  const auto j = trace_to_json(traces.front());
  CHECK(j.contains("status"));
  CHECK(j.contains("checkpoints"));
  CHECK(j["algorithm"] == traces.front().algorithm);
}

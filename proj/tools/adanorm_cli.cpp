// Command-line front end: single runs, b0 sweeps, bound evaluation, and the
// self-check suites.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adanorm/harness.hpp"
#include "adanorm/oracles.hpp"
#include "adanorm/theory.hpp"

namespace {

using adanorm::BoundInputs;
using adanorm::CheckReport;
using adanorm::GradientOracle;
using nlohmann::json;

// Seed streams for the standalone `run` subcommand.
constexpr std::uint64_t kRunDataStream = 0;
constexpr std::uint64_t kRunX0Stream = 1;
constexpr std::uint64_t kRunOracleStream = 2;

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stol(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

json report_to_json(const CheckReport& rep) {
  json j;
  j["name"] = rep.name;
  j["max_abs_err"] = rep.max_abs_err;
  j["max_rel_err"] = rep.max_rel_err;
  j["samples"] = rep.samples;
  j["tolerance"] = rep.tolerance;
  j["passed"] = rep.passed;
  j["details"] = rep.details;
  return j;
}

int cmd_run(const std::string& problem_kind, int m, int d,
            const std::string& oracle_spec, int batch,
            const std::string& algo, double b0, const std::string& eta_text,
            double beta, long iters, std::uint64_t seed,
            const std::string& checkpoints_text, const std::string& eps_text,
            const std::string& out_path) {
  adanorm::ProblemSpec pspec;
  pspec.kind = problem_kind;
  pspec.m = m;
  pspec.d = d;
  pspec.seed = adanorm::derive_seed(seed, kRunDataStream, 0);
  const adanorm::Problem problem = adanorm::make_problem(pspec);

  GradientOracle oracle;
  if (oracle_spec == "det") {
    oracle = GradientOracle::deterministic();
  } else if (oracle_spec == "minibatch") {
    oracle = GradientOracle::minibatch(
        batch, adanorm::derive_seed(seed, kRunOracleStream, 0));
  } else if (oracle_spec.rfind("gauss:", 0) == 0) {
    oracle = GradientOracle::additive_gaussian(
        std::stod(oracle_spec.substr(6)),
        adanorm::derive_seed(seed, kRunOracleStream, 0));
  } else {
    throw adanorm::ConfigError("oracle must be det, minibatch, or gauss:SIGMA");
  }

  const Eigen::VectorXd x0 = adanorm::uniform01_vector(
      problem.dimension, adanorm::derive_seed(seed, kRunX0Stream, 0));

  adanorm::AlgorithmConfig cfg;
  cfg.algo = algo;
  cfg.b0 = b0;
  if (algo == "adagrad-norm-momentum") cfg.beta = beta;
  if (eta_text == "auto") {
    if (!problem.f_star)
      throw adanorm::ConfigError("--eta auto needs a problem with known F*");
    cfg.eta = problem.eval(x0) - *problem.f_star;
  } else {
    cfg.eta = std::stod(eta_text);
  }

  adanorm::RunOptions opts;
  opts.iters = iters;
  opts.checkpoints = parse_long_list(checkpoints_text);
  opts.eps_targets = parse_double_list(eps_text);

  adanorm::RunTrace trace = adanorm::run(problem, oracle, cfg, x0, opts);
  trace.run_id = "0";
  trace.seed = seed;
  if (!out_path.empty()) adanorm::write_csv({trace}, out_path);
  std::cout << adanorm::trace_to_json(trace).dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
  std::ifstream f(config_path);
  if (!f) throw adanorm::ConfigError("cannot read config: " + config_path);
  json j = json::parse(f);
  adanorm::SweepConfig cfg = adanorm::sweep_config_from_json(j);
  if (!out_override.empty()) cfg.out_path = out_override;
  const auto traces = adanorm::run_sweep(cfg);
  if (!cfg.out_path.empty()) {
    adanorm::write_csv(traces, cfg.out_path);
    std::cout << "wrote " << cfg.out_path << " (" << traces.size()
              << " traces)\n";
  }
  std::cout << adanorm::format_summary(adanorm::summarize(traces));
  return 0;
}

int cmd_bounds(const std::string& theorem, const BoundInputs& in) {
  json out;
  out["inputs"] = {{"b0", in.b0},     {"eta", in.eta},
                   {"L", in.L},       {"sigma", in.sigma},
                   {"gamma", in.gamma}, {"deltaF", in.delta_F},
                   {"delta", in.delta}, {"N", in.N},
                   {"eps", in.eps}};
  if (theorem == "2.1") {
    const auto r = adanorm::theorem21_bound(in);
    out["Q"] = r.components.at("Q");
    out["bound1"] = r.components.at("bound1");
    out["bound2"] = r.components.at("bound2");
    out["result"] = r.value;
    out["branch"] = r.branch;
  } else if (theorem == "2.2") {
    const auto r = adanorm::theorem22_iterations(in);
    if (r.components.count("C_b0")) out["C_b0"] = r.components.at("C_b0");
    out["components"] = r.components;
    out["result"] = r.value;
    out["branch"] = r.branch;
  } else if (theorem == "gd") {
    const auto r =
        adanorm::classical_gd_iterations(in.b0, in.L, in.delta_F, in.eps);
    switch (r.kind) {
      case adanorm::GdIterations::Kind::Count:
        out["result"] = r.count;
        break;
      case adanorm::GdIterations::Kind::Divergent:
        out["result"] = "divergent";
        break;
      case adanorm::GdIterations::Kind::Unspecified:
        out["result"] = "unspecified";
        break;
    }
  } else if (theorem == "gl") {
    out["result"] = adanorm::ghadimi_lan_bound(in);
  } else {
    throw adanorm::ConfigError("theorem must be one of 2.1, 2.2, gd, gl");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

std::vector<CheckReport> check_grad_suite() {
  std::vector<CheckReport> reports;
  const double h = 1e-5, tol = 1e-6;
  {
    const auto problem = adanorm::make_log_smooth_problem(5);
    std::vector<Eigen::VectorXd> pts;
    adanorm::Rng rng(7);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd x(5);
      for (int k = 0; k < 5; ++k) x(k) = 4.0 * rng.normal();
      pts.push_back(x);
    }
    reports.push_back(adanorm::fd_gradient_check(problem, pts, h, tol));
  }
  {
    const auto ls = adanorm::make_gaussian_least_squares(50, 10, 11, true);
    const auto problem = adanorm::as_problem(ls);
    std::vector<Eigen::VectorXd> pts;
    adanorm::Rng rng(8);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd x(10);
      for (int k = 0; k < 10; ++k) x(k) = rng.normal();
      pts.push_back(x);
    }
    reports.push_back(adanorm::fd_gradient_check(problem, pts, h, tol));
  }
  {
    // 1-D quadratic through the least-squares wrapper.
    Eigen::MatrixXd a(1, 1);
    a << 1.0;
    const auto problem = adanorm::as_problem(adanorm::make_least_squares(
        a, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)));
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 20; ++i)
      pts.push_back(Eigen::VectorXd::Constant(1, i - 10.0));
    reports.push_back(adanorm::fd_gradient_check(problem, pts, h, tol));
  }
  return reports;
}

std::vector<CheckReport> check_oracle_suite() {
  std::vector<CheckReport> reports;
  {
    const auto ls = adanorm::make_gaussian_least_squares(6, 4, 21, true);
    reports.push_back(adanorm::minibatch_expectation_check(
        *ls, 3, adanorm::uniform01_vector(4, 5)));
  }
  {
    CheckReport rep;
    rep.name = "jacobi-vs-power-iteration";
    rep.tolerance = 1e-8;
    adanorm::Rng rng(31);
    for (int i = 0; i < 100; ++i) {
      const int k = 2 + static_cast<int>(rng.below(31));
      Eigen::MatrixXd b(k + 3, k);
      for (int r = 0; r < k + 3; ++r)
        for (int c = 0; c < k; ++c) b(r, c) = rng.normal();
      const auto ls = adanorm::make_least_squares(b, Eigen::VectorXd::Zero(k + 3));
      const double via_power =
          adanorm::estimate_lipschitz(*ls, 1e-12) * (k + 3);
      Eigen::MatrixXd gram = b.transpose() * b;
      gram = 0.5 * (gram + gram.transpose()).eval();
      const double via_jacobi = adanorm::dense_sym_eig_max(gram);
      const double rel =
          std::abs(via_power - via_jacobi) / std::max(1.0, via_jacobi);
      rep.max_abs_err = std::max(rep.max_abs_err, std::abs(via_power - via_jacobi));
      rep.max_rel_err = std::max(rep.max_rel_err, rel);
      ++rep.samples;
    }
    rep.passed = rep.max_rel_err <= rep.tolerance;
    reports.push_back(rep);
  }
  {
    const auto problem = adanorm::make_log_smooth_problem(10);
    const Eigen::VectorXd x = adanorm::uniform01_vector(10, 3);
    reports.push_back(adanorm::noise_variance_check(
        problem, GradientOracle::additive_gaussian(2.0, 99), x, 100000));
    reports.push_back(adanorm::noise_variance_check(
        problem, GradientOracle::additive_gaussian(0.0, 99), x, 10000));
  }
  {
    const auto ls = adanorm::make_gaussian_least_squares(8, 3, 17, true);
    const auto problem = adanorm::as_problem(ls);
    reports.push_back(adanorm::noise_variance_check(
        problem, GradientOracle::minibatch(8, 4), adanorm::uniform01_vector(3, 6),
        10000));
  }
  return reports;
}

std::vector<CheckReport> check_lemma_suite() {
  std::vector<CheckReport> reports;
  {
    CheckReport rep;
    rep.name = "log-sum-inequality-random";
    rep.tolerance = 0.0;
    adanorm::Rng rng(101);
    long violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const int len = 1 + static_cast<int>(rng.below(100));
      const double scale = std::exp(3.0 * rng.normal());
      std::vector<double> a(len);
      a[0] = 1.0 + std::abs(rng.normal()) * scale;
      for (int i = 1; i < len; ++i) a[i] = std::abs(rng.normal()) * scale;
      const auto r = adanorm::lemma_logsum_check(a);
      rep.max_abs_err = std::max(rep.max_abs_err, r.lhs - r.rhs);
      if (!r.holds) ++violations;
      ++rep.samples;
    }
    rep.max_rel_err = violations;
    rep.passed = violations == 0;
    rep.details.push_back("violations: " + std::to_string(violations));
    reports.push_back(rep);
  }
  {
    CheckReport rep;
    rep.name = "accumulator-escape-random";
    rep.tolerance = 0.0;
    adanorm::Rng rng(202);
    long violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const double b0 = std::exp(2.0 * rng.normal());
      const double c = b0 * std::exp(std::abs(rng.normal()));
      const double eps = std::max(1e-6, rng.uniform01());
      const double gap = c * c - b0 * b0;
      const long n = gap > 0 ? static_cast<long>(std::ceil(gap / eps)) + 1 : 0;
      if (n > 200000) continue;  // keep the brute force instant
      std::vector<double> a(std::max<long>(n, 1));
      for (auto& v : a) v = std::abs(rng.normal()) * eps * 2.0;
      const auto r = adanorm::lemma41_check(b0, c, eps, a);
      if (!r.holds) ++violations;
      ++rep.samples;
    }
    rep.max_rel_err = violations;
    rep.passed = violations == 0;
    rep.details.push_back("violations: " + std::to_string(violations));
    reports.push_back(rep);
  }
  return reports;
}

int cmd_check(const std::string& suite) {
  std::vector<CheckReport> reports;
  auto extend = [&](std::vector<CheckReport> more) {
    for (auto& r : more) reports.push_back(std::move(r));
  };
  if (suite == "grad" || suite == "all") extend(check_grad_suite());
  if (suite == "oracles" || suite == "all") extend(check_oracle_suite());
  if (suite == "lemmas" || suite == "all") extend(check_lemma_suite());
  if (reports.empty())
    throw adanorm::ConfigError("suite must be grad, lemmas, oracles, or all");
  json out = json::array();
  bool all_passed = true;
  for (const auto& r : reports) {
    out.push_back(report_to_json(r));
    all_passed = all_passed && r.passed;
  }
  std::cout << out.dump(2) << "\n";
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive-stepsize gradient methods: runs, sweeps, bounds"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "execute a single optimizer run");
  std::string problem_kind = "least-squares";
  int m = 2000, d = 1000, batch = 20;
  std::string oracle_spec = "det";
  std::string algo = "adagrad-norm";
  double b0 = 1.0, beta = 0.9;
  std::string eta_text = "auto";
  long iters = 100;
  std::uint64_t seed = 1;
  std::string checkpoints_text, eps_text, out_path;
  run_cmd->add_option("--problem", problem_kind, "least-squares|log-smooth");
  run_cmd->add_option("--m", m, "sample count (least-squares)");
  run_cmd->add_option("--d", d, "dimension");
  run_cmd->add_option("--batch", batch, "mini-batch size");
  run_cmd->add_option("--oracle", oracle_spec, "det|minibatch|gauss:SIGMA");
  run_cmd->add_option("--algo", algo, "step rule name");
  run_cmd->add_option("--b0", b0, "initial accumulator");
  run_cmd->add_option("--eta", eta_text, "scale, or 'auto' for F(x0) - F*");
  run_cmd->add_option("--beta", beta, "momentum parameter");
  run_cmd->add_option("--iters", iters, "iterations");
  run_cmd->add_option("--seed", seed, "root seed (data, x0, oracle streams)");
  run_cmd->add_option("--checkpoints", checkpoints_text, "comma-separated");
  run_cmd->add_option("--eps", eps_text, "comma-separated stationarity targets");
  run_cmd->add_option("--out", out_path, "CSV output path");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a configured b0 sweep");
  std::string config_path, sweep_out;
  sweep_cmd->add_option("--config", config_path, "JSON sweep config")
      ->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (overrides config)");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate a closed-form bound");
  std::string theorem;
  BoundInputs in;
  bounds_cmd->add_option("--theorem", theorem, "2.1|2.2|gd|gl")->required();
  bounds_cmd->add_option("--b0", in.b0);
  bounds_cmd->add_option("--eta", in.eta);
  bounds_cmd->add_option("--L", in.L);
  bounds_cmd->add_option("--sigma", in.sigma);
  bounds_cmd->add_option("--gamma", in.gamma);
  bounds_cmd->add_option("--deltaF", in.delta_F);
  bounds_cmd->add_option("--delta", in.delta);
  bounds_cmd->add_option("--N", in.N);
  bounds_cmd->add_option("--eps", in.eps);

  // check
  auto* check_cmd = app.add_subcommand("check", "run the verification oracles");
  std::string suite = "all";
  check_cmd->add_option("--suite", suite, "grad|lemmas|oracles|all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd)
      return cmd_run(problem_kind, m, d, oracle_spec, batch, algo, b0,
                     eta_text, beta, iters, seed, checkpoints_text, eps_text,
                     out_path);
    if (*sweep_cmd) return cmd_sweep(config_path, sweep_out);
    if (*bounds_cmd) return cmd_bounds(theorem, in);
    if (*check_cmd) return cmd_check(suite);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

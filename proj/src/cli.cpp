#include "nehari_lab/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "nehari_lab/checks.hpp"
#include "nehari_lab/config.hpp"
#include "nehari_lab/errors.hpp"
#include "nehari_lab/kernels.hpp"
#include "nehari_lab/solver.hpp"

namespace nehari_lab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Accumulates output files and the manifest for one run directory.
class Run {
 public:
  Run(std::string sub, const RunConfig& cfg, fs::path out) : sub_(std::move(sub)), cfg_(cfg), out_(std::move(out)) {
    fs::create_directories(out_);
    t0_ = std::chrono::steady_clock::now();
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    started_ = buf;
  }

  std::ofstream open(const std::string& name) {
    std::ofstream f(out_ / name);
    if (!f) throw ValidationError("cannot write " + (out_ / name).string());
    files_.push_back(name);
    return f;
  }

  void write_json(const std::string& name, json j) {
    j["manifest"] = "manifest.json";
    open(name) << j.dump(2) << "\n";
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (out_ / name).string();
  }

  void finish(int status, const json& extra = json::object()) {
    json m;
    m["software"] = "nehari-lab";
    m["version"] = kVersion;
    m["subcommand"] = sub_;
    m["seed"] = cfg_.solve.seed;
    m["config"] = to_json(cfg_);
    m["kernels_backend"] = kernels::name(kernels::active().backend);
    const int N = cfg_.N;
    const CBar cb = cbar_coefficients(N, 1.0 / cfg_.R);
    m["constants"] = {{"N", N},
                      {"S", sobolev_S(N)},
                      {"S_power", sobolev_S_power(N)},
                      {"A", curvature_A(N)},
                      {"B", talenti_B(N)},
                      {"Cbar1", cb.c1},
                      {"Cbar2", cb.c2},
                      {"instanton_scale_factor", instanton_scale_factor(N)},
                      {"half_space_threshold", half_space_threshold(N)}};
    m["timings"] = {{"started_utc", started_},
                    {"wall_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count()}};
    m["outputs"] = files_;
    m["exit_code"] = status;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream f(out_ / "manifest.json");
    f << m.dump(2) << "\n";
  }

 private:
  std::string sub_;
  RunConfig cfg_;
  fs::path out_;
  std::chrono::steady_clock::time_point t0_;
  std::string started_;
  std::vector<std::string> files_;
};

json diagnostics_json(const BlowupDiagnostics& d) {
  return {{"M", d.M},
          {"delta_M", d.delta_M},
          {"P_r", d.P_r},
          {"P_theta", d.P_theta},
          {"boundary_flag", d.boundary_flag},
          {"u_norm", d.u_norm},
          {"fit_ok", d.fit.ok},
          {"fit_eps", d.fit.params.eps},
          {"fit_C", d.fit.params.amplitude},
          {"fit_pole_theta", d.fit.pole_theta},
          {"w_norm", d.fit.w_norm},
          {"w_norm_rel", d.fit.w_norm_rel},
          {"fit_note", d.fit.note}};
}

json result_json(const SolveResult& r) {
  json starts = json::array();
  for (const auto& s : r.starts) {
    starts.push_back({{"kind", s.kind},
                      {"initial_I", s.initial_I},
                      {"final_I", s.final_I},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"grad_norm", s.grad_norm}});
  }
  return {{"S_alpha_est", r.S_alpha_est},
          {"triple", {{"a_bar", r.triple.a_bar}, {"b", r.triple.b}, {"c", r.triple.c}}},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"grad_norm", r.grad_norm},
          {"el_residual", r.el_residual},
          {"best_start", r.best_start},
          {"starts", starts},
          {"diagnostics", diagnostics_json(r.diagnostics)}};
}

const char* kSweepHeader = "alpha,S_est,converged,M,delta_M,fit_eps,fit_C,w_norm,boundary_flag\n";

std::string sweep_row(double alpha, const SolveResult& r) {
  const BlowupDiagnostics& d = r.diagnostics;
  return num(alpha) + "," + num(r.S_alpha_est) + "," + (r.converged ? "1" : "0") + "," + num(d.M) + "," +
         num(d.delta_M) + "," + num(d.fit.ok ? d.fit.params.eps : 0.0) + "," +
         num(d.fit.ok ? d.fit.params.amplitude : 0.0) + "," + num(d.fit.ok ? d.fit.w_norm : 0.0) + "," +
         (d.boundary_flag ? "1" : "0") + "\n";
}

int cmd_constants(const RunConfig& cfg, Run& run) {
  const int N = cfg.N;
  const ProblemParams p = cfg.params();
  const double vol = ball_volume(N, cfg.R);
  const CBar cb = cbar_coefficients(N, 1.0 / cfg.R);
  const Exponents e(N);
  const auto amax = amax_constant_bound(N, cfg.a, vol);
  json j = {{"N", N},
            {"two_star", e.star()},
            {"two_tilde", e.tilde()},
            {"S", sobolev_S(N)},
            {"S_power", sobolev_S_power(N)},
            {"S_alt", sobolev_S_alt(N)},
            {"A", curvature_A(N)},
            {"A_sphere_form", curvature_A_sphere_form(N)},
            {"B", talenti_B(N)},
            {"Cbar1", cb.c1},
            {"Cbar2", cb.c2},
            {"instanton_scale_factor", instanton_scale_factor(N)},
            {"half_space_threshold", half_space_threshold(N)},
            {"cbar_upper", upper_bound_constant(N)},
            {"ball_volume", vol},
            {"lambda", constant_solution_lambda(p)},
            {"kappa", constant_solution_kappa(p)},
            {"constant_energy", constant_solution_energy(p, vol)},
            {"I_alpha_of_one", I_alpha_of_one(p, vol)},
            {"amax", amax ? json(*amax) : json(nullptr)}};
  std::cout << j.dump(2) << "\n";
  run.write_json("constants.json", j);
  auto csv = run.open("constants.csv");
  csv << "name,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_number()) csv << it.key() << "," << num(it.value().get<double>()) << "\n";
  }
  return 0;
}

int cmd_nehari_check(const RunConfig& cfg, Run& run) {
  auto csv = run.open("nehari_check.csv");
  csv << "N,samples,max_stationarity,max_psi_gap,max_scale_gap,sandwich_violations,violations\n";
  int total = 0;
  json rows = json::array();
  for (int N = 5; N <= 8; ++N) {
    const NehariSuiteReport r = nehari_suite(N, cfg.samples, cfg.solve.seed + N);
    csv << N << "," << r.samples << "," << num(r.max_stationarity) << "," << num(r.max_psi_gap) << ","
        << num(r.max_scale_gap) << "," << r.sandwich_violations << "," << r.violations << "\n";
    total += r.violations;
    rows.push_back({{"N", N}, {"violations", r.violations}});
  }
  const InequalitySuiteReport l = inequality_suite(10 * cfg.samples, std::max(1, cfg.samples / 10), 10000, cfg.solve.seed);
  const int ineq_bad = l.calculus_violations + l.bernoulli_violations + l.h_violations;
  run.write_json("nehari_check.json", {{"per_dimension", rows},
                                       {"calculus_violations", l.calculus_violations},
                                       {"bernoulli_violations", l.bernoulli_violations},
                                       {"h_endpoint_violations", l.h_violations},
                                       {"total_violations", total + ineq_bad}});
  std::printf("nehari-check: %d violations\n", total + ineq_bad);
  return total + ineq_bad == 0 ? 0 : 3;
}

int cmd_instanton_verify(const RunConfig& cfg, Run& run) {
  const RadialReport rad = radial_check(cfg.N);
  const ExpansionReport rep = expansion_suite(cfg.N, cfg.R, cfg.eps_list);
  auto csv = run.open("expansion.csv");
  csv << "quantity,eps,value\n";
  json q = json::object();
  for (const ExpansionQuantity* x : {&rep.grad, &rep.star, &rep.tilde, &rep.ratio}) {
    for (std::size_t k = 0; k < x->eps.size(); ++k) csv << x->name << "," << num(x->eps[k]) << "," << num(x->values[k]) << "\n";
    q[x->name] = {{"c0", x->c0},
                  {"c1", x->c1},
                  {"expected_c0", x->expected_c0},
                  {"expected_c1", x->expected_c1},
                  {"expected_c1_scaled", x->expected_c1_scaled},
                  {"rel_error", x->rel_error},
                  {"rel_error_scaled", x->rel_error_scaled}};
  }
  const bool radial_ok = rad.rel_star <= 1e-7 && rad.rel_grad <= 1e-7 && rad.rel_tilde <= 1e-7;
  run.write_json("instanton_verify.json", {{"radial",
                                            {{"int_U_star", rad.star},
                                             {"int_grad_sq", rad.grad},
                                             {"int_U_tilde", rad.tilde},
                                             {"expected_star", rad.expected_star},
                                             {"expected_tilde", rad.expected_tilde},
                                             {"rel_star", rad.rel_star},
                                             {"rel_grad", rad.rel_grad},
                                             {"rel_tilde", rad.rel_tilde}}},
                                           {"expansion", q}});
  std::printf("instanton-verify: radial %s; grad slope %.6g (expected %.6g, scaled %.6g)\n", radial_ok ? "ok" : "FAILED",
              rep.grad.c1, rep.grad.expected_c1, rep.grad.expected_c1_scaled);
  return radial_ok ? 0 : 3;
}

int cmd_minimize(const RunConfig& cfg, Run& run) {
  auto grid = build_grid(cfg.grid_spec());
  const SolveResult r = minimize(cfg.params(), cfg.solve, grid);
  json j = result_json(r);
  j["alpha"] = cfg.alpha;
  j["I_alpha_of_one"] = I_alpha_of_one(cfg.params(), grid->volume());
  run.write_json("minimize.json", j);
  write_field_snapshot(r.minimizer, run.path("minimizer.csv"), run.path("minimizer_header.json"));
  std::printf("minimize: S_est = %.17g (converged %d, %d iterations)\n", r.S_alpha_est, r.converged, r.iterations);
  return r.converged ? 0 : 3;
}

int cmd_sweep(const RunConfig& cfg, Run& run) {
  if (cfg.alpha_list.empty()) throw ConfigError("invalid config keys: alpha_list (required for sweep)");
  for (std::size_t k = 1; k < cfg.alpha_list.size(); ++k) {
    if (!(cfg.alpha_list[k] > cfg.alpha_list[k - 1])) throw ConfigError("invalid config keys: alpha_list (must ascend)");
  }
  auto grid = build_grid(cfg.grid_spec());
  const SweepResult s = sweep_alpha(cfg.params(), cfg.alpha_list, cfg.solve, grid);
  auto csv = run.open("sweep.csv");
  csv << kSweepHeader;
  bool all_converged = true;
  json results = json::array();
  for (std::size_t k = 0; k < s.alphas.size(); ++k) {
    csv << sweep_row(s.alphas[k], s.results[k]);
    all_converged = all_converged && s.results[k].converged;
    json j = result_json(s.results[k]);
    j["alpha"] = s.alphas[k];
    results.push_back(j);
    char name[64];
    std::snprintf(name, sizeof name, "minimizer_%03zu", k);
    write_field_snapshot(s.results[k].minimizer, run.path(std::string(name) + ".csv"),
                         run.path(std::string(name) + "_header.json"));
  }
  run.write_json("sweep.json", {{"results", results}, {"monotonicity_violations", s.violations}});
  std::printf("sweep: %zu points, %zu monotonicity violations\n", s.alphas.size(), s.violations.size());
  return all_converged && s.violations.empty() ? 0 : 3;
}

int cmd_alpha0(const RunConfig& cfg, Run& run) {
  auto grid = build_grid(cfg.grid_spec());
  const Alpha0Result r = estimate_alpha0(cfg.params(), cfg.solve, grid, cfg.alpha_lo, cfg.alpha_hi);
  auto csv = run.open("alpha0_evaluations.csv");
  csv << "alpha,S_est\n";
  for (const auto& [a, s] : r.evaluations) csv << num(a) << "," << num(s) << "\n";
  run.write_json("alpha0.json", {{"alpha_hat", r.alpha_hat},
                                 {"certificate",
                                  {{"alpha_lo", r.alpha_lo},
                                   {"S_lo", r.S_lo},
                                   {"alpha_hi", r.alpha_hi},
                                   {"S_hi", r.S_hi},
                                   {"target", r.target}}},
                                 {"threshold", r.threshold},
                                 {"tau", cfg.solve.tau},
                                 {"lower_bound_A_over_R", r.A_over_R},
                                 {"lower_bound_A_over_R_instanton_normalization", r.A_scaled_over_R},
                                 {"amax_constant_bound", r.amax ? json(*r.amax) : json(nullptr)},
                                 {"bias", "discrete S_est >= S_alpha on the axisymmetric space; alpha_hat is lower-biased"},
                                 {"result_lo", result_json(r.result_lo)},
                                 {"result_hi", result_json(r.result_hi)}});
  std::printf("alpha0: alpha_hat = %.17g in [%.17g, %.17g]\n", r.alpha_hat, r.alpha_lo, r.alpha_hi);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical experiments for Neumann problems with critical and trace-critical nonlinearities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string config_path, out_dir = "nehari-lab-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::map<std::string, std::string> overrides;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"constants", "closed-form constants for N"},
      {"nehari-check", "randomized Nehari algebra and inequality checks"},
      {"instanton-verify", "instanton integrals and boundary expansions"},
      {"minimize", "minimize I_alpha on the grid"},
      {"sweep", "alpha sweep with warm starts"},
      {"alpha0", "threshold estimate by bisection"}};
  for (const auto& [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", config_path, "key = value config file");
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--seed", seed, "random seed");
    s->add_option("--threads", threads, "worker threads");
    for (const std::string& key : config_keys()) {
      if (key == "seed" || key == "threads") continue;
      s->add_option_function<std::string>("--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                          "override " + key);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (const char* env = std::getenv(kThreadsEnv)) {
      apply_settings(cfg, {{"threads", env}});
    }
    if (!config_path.empty()) apply_settings(cfg, read_config_file(config_path));
    std::vector<std::pair<std::string, std::string>> kv(overrides.begin(), overrides.end());
    // stretch before stretch_theta so an explicit theta override wins.
    std::stable_sort(kv.begin(), kv.end(), [](const auto& x, const auto& y) {
      return (x.first == "stretch_theta") < (y.first == "stretch_theta");
    });
    apply_settings(cfg, kv);
    if (seed) cfg.solve.seed = *seed;
    if (threads) {
      if (*threads < 1) throw ConfigError("invalid config keys: threads");
      cfg.solve.threads = *threads;
    }
    cfg.solve.validate();
    if (cfg.kernels == "scalar") {
      kernels::select(kernels::Backend::scalar);
    } else if (cfg.kernels == "avx2") {
      if (!kernels::supported(kernels::Backend::avx2)) throw ConfigError("invalid config keys: kernels (avx2 unsupported)");
      kernels::select(kernels::Backend::avx2);
    }

    Run run(sub, cfg, out_dir);
    int status = 0;
    try {
      if (sub == "constants") status = cmd_constants(cfg, run);
      else if (sub == "nehari-check") status = cmd_nehari_check(cfg, run);
      else if (sub == "instanton-verify") status = cmd_instanton_verify(cfg, run);
      else if (sub == "minimize") status = cmd_minimize(cfg, run);
      else if (sub == "sweep") status = cmd_sweep(cfg, run);
      else status = cmd_alpha0(cfg, run);
    } catch (const ValidationError&) {
      run.finish(2);
      throw;
    } catch (const AccuracyError&) {
      run.finish(3);
      throw;
    }
    run.finish(status);
    return status;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const AccuracyError& e) {
    std::fprintf(stderr, "accuracy error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  }
}

}  // namespace nehari_lab

#include "nehari_lab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nehari_lab/errors.hpp"

namespace nehari_lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool to_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  const auto r = std::from_chars(t.data(), end, out);
  return r.ec == std::errc() && r.ptr == end && std::isfinite(out);
}

template <class Int>
bool to_int(const std::string& s, Int& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  const auto r = std::from_chars(t.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

bool to_list(const std::string& s, std::vector<double>& out) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream in(t);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    double x;
    if (!to_double(tok, x)) return false;
    v.push_back(x);
  }
  if (v.empty()) return false;
  out = std::move(v);
  return true;
}

}  // namespace

GridSpec RunConfig::grid_spec() const {
  GridSpec g = grid;
  g.N = N;
  g.R = R;
  return g;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "N",         "R",        "a",        "alpha",       "alpha_list", "n_r",     "n_theta",
      "stretch",   "stretch_theta",        "gauss_order", "max_iters",  "grad_tol", "n_starts",
      "seed",      "tau",      "alpha_lo", "alpha_hi",    "alpha_rel_tol", "eps_list", "threads",
      "samples",   "kernels"};
  return keys;
}

void apply_settings(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::vector<std::string> bad;
  bool theta_set = false;
  for (const auto& [key, value] : kv) {
    if (key == "stretch_theta") theta_set = true;
  }
  for (const auto& [key, value] : kv) {
    bool ok = true;
    if (key == "N") {
      ok = to_int(value, cfg.N) && cfg.N >= 5 && cfg.N <= kMaxDimension;
    } else if (key == "R") {
      ok = to_double(value, cfg.R) && cfg.R > 0.0;
    } else if (key == "a") {
      ok = to_double(value, cfg.a) && cfg.a > 0.0;
    } else if (key == "alpha") {
      ok = to_double(value, cfg.alpha) && cfg.alpha >= 0.0;
    } else if (key == "alpha_list") {
      ok = to_list(value, cfg.alpha_list);
    } else if (key == "n_r") {
      ok = to_int(value, cfg.grid.n_r) && cfg.grid.n_r >= 32;
    } else if (key == "n_theta") {
      ok = to_int(value, cfg.grid.n_theta) && cfg.grid.n_theta >= 32;
    } else if (key == "stretch") {
      ok = to_double(value, cfg.grid.stretch_r) && cfg.grid.stretch_r >= 0.0 && cfg.grid.stretch_r <= 30.0;
      if (ok && !theta_set) cfg.grid.stretch_theta = cfg.grid.stretch_r;
    } else if (key == "stretch_theta") {
      ok = to_double(value, cfg.grid.stretch_theta) && cfg.grid.stretch_theta >= 0.0 && cfg.grid.stretch_theta <= 30.0;
    } else if (key == "gauss_order") {
      ok = to_int(value, cfg.grid.gauss_order) && cfg.grid.gauss_order >= 2 && cfg.grid.gauss_order <= 8;
    } else if (key == "max_iters") {
      ok = to_int(value, cfg.solve.max_iters) && cfg.solve.max_iters >= 1;
    } else if (key == "grad_tol") {
      ok = to_double(value, cfg.solve.grad_tol) && cfg.solve.grad_tol > 0.0;
    } else if (key == "n_starts") {
      ok = to_int(value, cfg.solve.n_starts) && cfg.solve.n_starts >= 0;
    } else if (key == "seed") {
      ok = to_int(value, cfg.solve.seed);
    } else if (key == "tau") {
      ok = to_double(value, cfg.solve.tau) && cfg.solve.tau > 0.0 && cfg.solve.tau < 0.1;
    } else if (key == "alpha_lo") {
      ok = to_double(value, cfg.alpha_lo) && cfg.alpha_lo >= 0.0;
    } else if (key == "alpha_hi") {
      ok = to_double(value, cfg.alpha_hi) && cfg.alpha_hi > 0.0;
    } else if (key == "alpha_rel_tol") {
      ok = to_double(value, cfg.solve.alpha_rel_tol) && cfg.solve.alpha_rel_tol > 0.0 && cfg.solve.alpha_rel_tol < 1.0;
    } else if (key == "eps_list") {
      ok = to_list(value, cfg.eps_list);
    } else if (key == "threads") {
      ok = to_int(value, cfg.solve.threads) && cfg.solve.threads >= 1;
    } else if (key == "samples") {
      ok = to_int(value, cfg.samples) && cfg.samples >= 1;
    } else if (key == "kernels") {
      cfg.kernels = trim(value);
      ok = cfg.kernels == "auto" || cfg.kernels == "scalar" || cfg.kernels == "avx2";
    } else {
      ok = false;
    }
    if (!ok) bad.push_back(key);
  }
  if (!bad.empty()) {
    std::string msg = "invalid config keys:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg);
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::string> bad;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      bad.push_back("line " + std::to_string(lineno));
      continue;
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (!bad.empty()) {
    std::string msg = "malformed config:";
    for (const auto& b : bad) msg += " " + b;
    throw ConfigError(msg);
  }
  return kv;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["N"] = c.N;
  j["R"] = c.R;
  j["a"] = c.a;
  j["alpha"] = c.alpha;
  j["alpha_list"] = c.alpha_list;
  j["n_r"] = c.grid.n_r;
  j["n_theta"] = c.grid.n_theta;
  j["stretch"] = c.grid.stretch_r;
  j["stretch_theta"] = c.grid.stretch_theta;
  j["gauss_order"] = c.grid.gauss_order;
  j["max_iters"] = c.solve.max_iters;
  j["grad_tol"] = c.solve.grad_tol;
  j["n_starts"] = c.solve.n_starts;
  j["seed"] = c.solve.seed;
  j["tau"] = c.solve.tau;
  j["alpha_lo"] = c.alpha_lo;
  j["alpha_hi"] = c.alpha_hi;
  j["alpha_rel_tol"] = c.solve.alpha_rel_tol;
  j["eps_list"] = c.eps_list;
  j["threads"] = c.solve.threads;
  j["samples"] = c.samples;
  j["kernels"] = c.kernels;
  return j;
}

}  // namespace nehari_lab

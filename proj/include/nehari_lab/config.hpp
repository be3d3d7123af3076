#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nehari_lab/domain_grid.hpp"
#include "nehari_lab/solver.hpp"

namespace nehari_lab {

/// Everything a run needs, from a key = value file plus overrides.
struct RunConfig {
  int N = 5;
  double R = 1.0;
  double a = 1.0;
  double alpha = 0.0;
  std::vector<double> alpha_list;
  GridSpec grid;
  SolveConfig solve;
  double alpha_lo = 0.0;
  double alpha_hi = 5.0;
  std::vector<double> eps_list{0.004, 0.002, 0.001};
  /// Nehari suite size per dimension.
  int samples = 10000;
  std::string kernels = "auto";

  ProblemParams params() const { return ProblemParams(N, a, alpha, R); }
  GridSpec grid_spec() const;
};

/// Keys accepted in config files and as --key overrides.
const std::vector<std::string>& config_keys();

/// Applies key = value pairs in order. Unknown keys and unparsable values are
/// collected and reported together in one ConfigError.
void apply_settings(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv);

/// Parses "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace nehari_lab

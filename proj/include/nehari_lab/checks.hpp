#pragma once

#include <cstdint>

namespace nehari_lab {

/// Randomized checks of the Nehari reduction on log-uniform triples.
struct NehariSuiteReport {
  int N;
  int samples;
  double max_stationarity;  // |d/ds phi| at t(u), relative to the sum of term magnitudes
  double max_psi_gap;       // psiu vs psid vs direct, relative
  double max_scale_gap;     // I under u -> lambda u, relative
  int sandwich_violations;
  int violations;  // total over all properties
};
NehariSuiteReport nehari_suite(int N, int samples, std::uint64_t seed);

struct InequalitySuiteReport {
  int inequality_samples;
  int calculus_violations;
  int bernoulli_violations;
  int h_params;
  int h_grid_points;
  int h_violations;
};
InequalitySuiteReport inequality_suite(int inequality_samples, int h_params, int h_grid_points, std::uint64_t seed);

/// Whole-space integrals of the instanton against their closed forms.
struct RadialReport {
  int N;
  double star;       // int U^{2*}
  double grad;       // int |grad U|^2
  double tilde;      // int U^{2~}
  double expected_star;
  double expected_tilde;
  double rel_star;
  double rel_grad;
  double rel_tilde;
};
RadialReport radial_check(int N);

}  // namespace nehari_lab

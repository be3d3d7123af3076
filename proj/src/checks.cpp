#include "nehari_lab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nehari_lab/constants.hpp"
#include "nehari_lab/instanton.hpp"
#include "nehari_lab/nehari.hpp"

namespace nehari_lab {

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

}  // namespace

NehariSuiteReport nehari_suite(int N, int samples, std::uint64_t seed) {
  const Exponents e(N);
  const double cbar = upper_bound_constant(N);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lg(-3.0, 3.0), ls(-2.0, 2.0);
  std::bernoulli_distribution zero_b(0.1);
  NehariSuiteReport r{N, samples, 0.0, 0.0, 0.0, 0, 0};
  for (int i = 0; i < samples; ++i) {
    const NormTriple t{std::pow(10.0, lg(rng)), zero_b(rng) ? 0.0 : std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)),
                       N};
    const double s = project_t(t);
    const double h = 1e-5 * s;
    const double dphi = (phi_along_ray(t, s + h) - phi_along_ray(t, s - h)) / (2.0 * h);
    const double scale = t.a_bar * s + t.b * std::pow(s, e.tilde() - 1.0) + t.c * std::pow(s, e.star() - 1.0);
    const double stat = std::abs(dphi) / scale;
    const double p = psi(t);
    const double gap = std::max(rel(psi_delta_form(t), p), rel(psi_direct(t), p));
    const double I = big_I(t);
    const bool sandwich = lower_bound(t) <= I * (1.0 + 1e-13) && I <= upper_bound(t, cbar) * (1.0 + 1e-13);
    const double sc = std::pow(10.0, ls(rng));
    const NormTriple u{t.a_bar * sc * sc, t.b * std::pow(sc, e.tilde()), t.c * std::pow(sc, e.star()), N};
    const double sg = rel(big_I(u), I);
    r.max_stationarity = std::max(r.max_stationarity, stat);
    r.max_psi_gap = std::max(r.max_psi_gap, gap);
    r.max_scale_gap = std::max(r.max_scale_gap, sg);
    if (!sandwich) ++r.sandwich_violations;
    if (stat > 1e-9 || gap > 1e-10 || !sandwich || sg > 1e-12) ++r.violations;
  }
  return r;
}

InequalitySuiteReport inequality_suite(int inequality_samples, int h_params, int h_grid_points, std::uint64_t seed) {
  InequalitySuiteReport r{inequality_samples, 0, 0, h_params, h_grid_points, 0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eta(2.0, 10.0), z(-1.0, 10.0), eb(0.0, 10.0);
  for (int i = 0; i < inequality_samples; ++i) {
    const auto [l, rr] = calculus_inequality(std::nextafter(eta(rng), 11.0), z(rng));
    if (l > rr + 1e-12 * std::max(1.0, std::abs(rr))) ++r.calculus_violations;
    const double zz = std::max(z(rng), -1.0 + 1e-12);
    const auto [bl, br] = bernoulli_inequality(std::nextafter(eb(rng), 11.0), zz);
    if (bl < br - 1e-12 * std::max(1.0, std::abs(br))) ++r.bernoulli_violations;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0), lg(-2.0, 2.0);
  for (int i = 0; i < h_params; ++i) {
    const HParams p{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)) * (u(rng) < 0.1 ? 0.0 : 1.0),
                    std::pow(10.0, lg(rng)), 0.01 + 0.98 * u(rng), 5 + i % 4};
    if (!h_endpoint_minimum_check(p, h_grid_points).at_endpoint) ++r.h_violations;
  }
  return r;
}

RadialReport radial_check(int N) {
  RadialReport r{};
  r.N = N;
  const Exponents e(N);
  r.star = radial_integral(e.star(), N);
  r.grad = radial_gradient_integral(N);
  r.tilde = radial_integral(e.tilde(), N);
  r.expected_star = sobolev_S_power(N);
  r.expected_tilde = e.tilde() * talenti_B(N);
  r.rel_star = rel(r.star, r.expected_star);
  r.rel_grad = rel(r.grad, r.expected_star);
  r.rel_tilde = rel(r.tilde, r.expected_tilde);
  return r;
}

}  // namespace nehari_lab

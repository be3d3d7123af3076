#include "nehari_lab/constants.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nehari_lab/errors.hpp"

namespace nehari_lab {

namespace {

void require_dimension(int N, int lo, const char* who) {
  if (N < lo || N > kMaxDimension) {
    throw DomainError(std::string(who) + ": N must lie in [" + std::to_string(lo) + ", " +
                      std::to_string(kMaxDimension) + "], got " + std::to_string(N));
  }
}

}  // namespace

Exponents::Exponents(int n)
    : N(n),
      two_star(2 * static_cast<std::int64_t>(n), n > 2 ? n - 2 : 1),
      two_tilde(2 * static_cast<std::int64_t>(n - 1), n > 2 ? n - 2 : 1) {
  require_dimension(n, 5, "Exponents");
}

ProblemParams::ProblemParams(int n, double a_, double alpha_, double radius_)
    : exponents(n), a(a_), alpha(alpha_), radius(radius_) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("ProblemParams: a must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("ProblemParams: alpha must be nonnegative");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ProblemParams: radius must be positive");
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

double sphere_area(int N) {
  require_dimension(N, 2, "sphere_area");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / gamma_fn(0.5 * N);
}

double ball_volume(int N, double R) {
  if (!(R > 0.0)) throw DomainError("ball_volume: radius must be positive");
  return sphere_area(N) * std::pow(R, N) / N;
}

double sobolev_S_power(int N) {
  require_dimension(N, 3, "sobolev_S");
  const double k = static_cast<double>(N) * (N - 2);
  return std::pow(std::numbers::pi, 0.5 * (N + 1)) / std::pow(2.0, N - 1) /
         gamma_fn(0.5 * (N + 1)) * std::pow(k, 0.5 * N);
}

double sobolev_S(int N) { return std::pow(sobolev_S_power(N), 2.0 / N); }

double sobolev_S_alt(int N) {
  require_dimension(N, 3, "sobolev_S_alt");
  return std::numbers::pi * N * (N - 2) * std::pow(gamma_fn(0.5 * N) / gamma_fn(N), 2.0 / N);
}

double talenti_B(int N) {
  require_dimension(N, 3, "talenti_B");
  const double k = static_cast<double>(N) * (N - 2);
  return sphere_area(N) * std::pow(2.0, -N) * std::sqrt(std::numbers::pi) * gamma_fn(0.5 * N) /
         gamma_fn(0.5 * (N + 1)) * std::pow(k, 0.5 * N);
}

double curvature_A(int N) {
  require_dimension(N, 5, "curvature_A");
  return (N - 1.0) / N / std::sqrt(std::numbers::pi) * gamma_fn(0.5 * (N - 3)) /
         gamma_fn(0.5 * (N - 2));
}

double curvature_A_sphere_form(int N) {
  require_dimension(N, 5, "curvature_A");
  return 2.0 / N * (sphere_area(N - 1) / sphere_area(N)) * gamma_fn(0.5 * (N + 1)) *
         gamma_fn(0.5 * (N - 3)) / (gamma_fn(0.5 * N) * gamma_fn(0.5 * (N - 2)));
}

CBar cbar_coefficients(int N, double H) {
  require_dimension(N, 5, "cbar_coefficients");
  const double k = static_cast<double>(N) * (N - 2);
  const double w = sphere_area(N - 1);
  const double gN = gamma_fn(N);
  const double c1 = H * w * (N - 2.0) * (N - 2.0) / 4.0 * gamma_fn(0.5 * (N + 3)) *
                    gamma_fn(0.5 * (N - 3)) / gN * std::pow(k, 0.5 * (N - 2));
  const double c2 = H * w / 4.0 * gamma_fn(0.5 * (N + 1)) * gamma_fn(0.5 * (N - 1)) / gN *
                    std::pow(k, 0.5 * N);
  return {c1, c2};
}

double instanton_scale_factor(int N) {
  require_dimension(N, 3, "instanton_scale_factor");
  return std::sqrt(static_cast<double>(N) * (N - 2));
}

double half_space_threshold(int N) { return sobolev_S(N) / std::pow(2.0, 2.0 / N); }

double constant_solution_lambda(const ProblemParams& p) {
  return 0.5 * (p.alpha + std::sqrt(p.alpha * p.alpha + 4.0 * p.a));
}

double constant_solution_kappa(const ProblemParams& p) {
  return std::pow(constant_solution_lambda(p), 0.5 * (p.N() - 2));
}

double constant_solution_energy(const ProblemParams& p, double volume) {
  if (!(volume > 0.0)) throw DomainError("constant_solution_energy: volume must be positive");
  const int N = p.N();
  const double l = constant_solution_lambda(p);
  return volume / (p.exponents.tilde() * N) *
         (std::pow(l, N) + 0.5 * p.exponents.star() * p.a * std::pow(l, N - 2));
}

double I_alpha_of_one(const ProblemParams& p, double volume) {
  if (!(volume > 0.0)) throw DomainError("I_alpha_of_one: volume must be positive");
  const int N = p.N();
  const double l = constant_solution_lambda(p);
  const double bracket = std::pow(l, N) + 0.5 * p.exponents.star() * p.a * std::pow(l, N - 2);
  return std::pow(volume / p.exponents.tilde(), 2.0 / N) * std::pow(bracket, 2.0 / N);
}

std::optional<double> amax_constant_bound(int N, double a, double volume) {
  const double S = sobolev_S(N);
  if (a > S / std::pow(2.0 * volume, 2.0 / N)) return std::nullopt;
  const double thr = half_space_threshold(N);
  auto above = [&](double alpha) { return I_alpha_of_one(ProblemParams(N, a, alpha, 1.0), volume) > thr; };
  double lo = 0.0;
  double hi = 1.0;
  while (!above(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? hi : lo) = mid;
  }
  return lo;
}

}  // namespace nehari_lab

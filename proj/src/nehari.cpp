#include "nehari_lab/nehari.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nehari_lab/constants.hpp"
#include "nehari_lab/errors.hpp"

namespace nehari_lab {

void validate(const NormTriple& t) {
  if (t.N < 5 || t.N > kMaxDimension) throw DomainError("NormTriple: N out of range");
  if (!(t.c > 0.0) || !std::isfinite(t.c)) throw DegenerateInputError("NormTriple: c must be positive");
  if (!(t.a_bar > 0.0) || !std::isfinite(t.a_bar)) throw DegenerateInputError("NormTriple: a_bar must be positive");
  if (!(t.b >= 0.0) || !std::isfinite(t.b)) throw DegenerateInputError("NormTriple: b must be nonnegative");
}

Reduced reduce(const NormTriple& t) {
  validate(t);
  const int N = t.N;
  Reduced r{};
  r.beta = t.a_bar / std::pow(t.c, (N - 2.0) / N);
  r.gamma = t.b / std::pow(t.c, (N - 1.0) / N);
  r.delta = r.gamma / (2.0 * std::sqrt(r.beta));
  return r;
}

double project_t(const NormTriple& t) {
  validate(t);
  const double s = (t.b + std::sqrt(t.b * t.b + 4.0 * t.a_bar * t.c)) / (2.0 * t.c);
  return std::pow(s, 0.5 * (t.N - 2));
}

double nehari_residual(const NormTriple& t, double s) {
  const Exponents e(t.N);
  return t.a_bar * s * s + t.b * std::pow(s, e.tilde()) - t.c * std::pow(s, e.star());
}

double phi_along_ray(const NormTriple& t, double s) {
  const Exponents e(t.N);
  return 0.5 * t.a_bar * s * s + t.b * std::pow(s, e.tilde()) / e.tilde() -
         t.c * std::pow(s, e.star()) / e.star();
}

double psi(const NormTriple& t) {
  const Reduced r = reduce(t);
  const Exponents e(t.N);
  const int N = t.N;
  const double f = r.gamma + std::sqrt(r.gamma * r.gamma + 4.0 * r.beta);
  return (std::pow(f, N) + 2.0 * e.star() * r.beta * std::pow(f, N - 2)) /
         (N * e.tilde() * std::pow(2.0, N));
}

double psi_delta_form(const NormTriple& t) {
  const Reduced r = reduce(t);
  const Exponents e(t.N);
  const int N = t.N;
  const double D = r.delta + std::sqrt(r.delta * r.delta + 1.0);
  return std::pow(r.beta, 0.5 * N) / (N * e.tilde()) *
         (std::pow(D, N) + 0.5 * e.star() * std::pow(D, N - 2));
}

double psi_direct(const NormTriple& t) { return phi_along_ray(t, project_t(t)); }

double big_I(const NormTriple& t) { return std::pow(t.N * psi(t), 2.0 / t.N); }

double big_I_delta_form(const NormTriple& t) {
  const Reduced r = reduce(t);
  return r.beta * lambda_bracket(t.N, r.delta);
}

double big_I_product_form(const NormTriple& t) {
  const Reduced r = reduce(t);
  const Exponents e(t.N);
  const double d = r.delta;
  const double root = std::sqrt(d * d + 1.0);
  const double k = 2.0 / e.tilde();
  return r.beta * std::pow(d + root, 4.0 / e.star()) *
         std::pow(k * d * d + k * d * root + 1.0, 2.0 / t.N);
}

double lower_bound(const NormTriple& t) {
  const Reduced r = reduce(t);
  return r.beta * (1.0 + 4.0 / Exponents(t.N).tilde() * r.delta);
}

double lambda_bracket(int N, double delta) {
  const Exponents e(N);
  const double D = delta + std::sqrt(delta * delta + 1.0);
  return std::pow(std::pow(D, N) + 0.5 * e.star() * std::pow(D, N - 2), 2.0 / N) /
         std::pow(e.tilde(), 2.0 / N);
}

double upper_bound_constant(int N) {
  const Exponents e(N);
  const double slope = 4.0 / e.tilde();
  // Dense log grid on (0, 1e3], then the delta -> infinity asymptote of the
  // quotient, which is 4/(2~)^{2/N}.
  double sup = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double d = std::pow(10.0, -3.0 + 6.0 * i / n);
    const double q = (lambda_bracket(N, d) - 1.0 - slope * d) / (d * d);
    sup = std::max(sup, q);
  }
  const double asymptote = 4.0 / std::pow(e.tilde(), 2.0 / N);
  return std::max(sup, asymptote);
}

double upper_bound(const NormTriple& t, double cbar) {
  const Reduced r = reduce(t);
  return r.beta * (1.0 + 4.0 / Exponents(t.N).tilde() * r.delta + cbar * r.delta * r.delta);
}

NehariPartials nehari_partials(const NormTriple& t) {
  const Exponents e(t.N);
  NehariPartials p{};
  p.t = project_t(t);
  p.psi = psi(t);
  p.I = std::pow(t.N * p.psi, 2.0 / t.N);
  // dPsi/d(a_bar, b, c) by the envelope theorem at the Nehari scaling;
  // dI = (2 I / (N Psi)) dPsi.
  const double k = 2.0 * p.I / (t.N * p.psi);
  p.dI_da = k * 0.5 * p.t * p.t;
  p.dI_db = k * std::pow(p.t, e.tilde()) / e.tilde();
  p.dI_dc = -k * std::pow(p.t, e.star()) / e.star();
  return p;
}

namespace {

void validate_h(const HParams& p) {
  if (p.N < 5 || p.N > kMaxDimension) throw DomainError("HParams: N out of range");
  if (!(p.beta_bar > 0.0)) throw DomainError("HParams: beta_bar must be positive");
  if (!(p.gamma_bar >= 0.0)) throw DomainError("HParams: gamma_bar must be nonnegative");
  if (!(p.mu_mass >= 0.0)) throw DomainError("HParams: mu_mass must be nonnegative");
  if (!(p.nu_mass >= 0.0 && p.nu_mass <= 1.0)) throw DomainError("HParams: nu_mass must lie in [0,1]");
}

}  // namespace

double h_function(const HParams& p, double x) {
  validate_h(p);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("h_function: x must lie in [0,1]");
  const Exponents e(p.N);
  const int N = p.N;
  const double zs = (N - 1.0) / N;  // 2~/2*
  const double ds = (N - 2.0) / N;  // 2/2*
  const double m = p.nu_mass > 0.0 ? p.mu_mass / std::pow(p.nu_mass, ds) : 0.0;
  const double gx = p.gamma_bar * std::pow(x, zs);
  const double g = p.beta_bar * std::pow(x, ds) + m * std::pow(1.0 - x, ds);
  const double f = gx + std::sqrt(gx * gx + 4.0 * g);
  return std::pow(f, N) + 2.0 * e.star() * std::pow(f, N - 2) * g;
}

double h_level(const HParams& p, double x) {
  const Exponents e(p.N);
  return std::pow(h_function(p, x), 2.0 / p.N) / (4.0 * std::pow(e.tilde(), 2.0 / p.N));
}

EndpointCheck h_endpoint_minimum_check(const HParams& p, int grid_points) {
  if (grid_points < 1000) throw DomainError("h_endpoint_minimum_check: need at least 1000 grid points");
  EndpointCheck out{false, 0.0, std::numeric_limits<double>::infinity()};
  int arg = 0;
  for (int i = 0; i <= grid_points; ++i) {
    const double x = static_cast<double>(i) / grid_points;
    const double h = h_function(p, x);
    if (h < out.min_value) {
      out.min_value = h;
      arg = i;
    }
  }
  out.argmin = static_cast<double>(arg) / grid_points;
  out.at_endpoint = arg <= 1 || arg >= grid_points - 1;
  return out;
}

std::pair<double, double> calculus_inequality(double eta, double z) {
  if (!(eta > 2.0)) throw DomainError("calculus_inequality: eta must exceed 2");
  if (!(z >= -1.0)) throw DomainError("calculus_inequality: z must be >= -1");
  const double q = 0.5 * eta * (eta - 1.0);
  const double lhs = q * z * z - (1.0 + q) * std::abs(z) + 1.0;
  return {lhs, std::pow(z + 1.0, eta)};
}

std::pair<double, double> bernoulli_inequality(double eta, double z) {
  if (!(eta > 0.0)) throw DomainError("bernoulli_inequality: eta must be positive");
  if (!(z > -1.0)) throw DomainError("bernoulli_inequality: z must exceed -1");
  return {std::pow(1.0 + z, -eta), 1.0 - eta * z};
}

}  // namespace nehari_lab

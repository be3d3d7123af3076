#pragma once

#include <utility>

namespace nehari_lab {

/// a_bar = |grad u|^2 + a|u|_2^2, b = alpha |u|_{2~}^{2~}, c = |u|_{2*}^{2*}.
struct NormTriple {
  double a_bar;
  double b;
  double c;
  int N;
};

/// beta = a_bar/c^{(N-2)/N}, gamma = b/c^{(N-1)/N}, delta = gamma/(2 sqrt(beta)).
struct Reduced {
  double beta;
  double gamma;
  double delta;
};

void validate(const NormTriple& t);
Reduced reduce(const NormTriple& t);

/// Nehari scaling: t(u) u lies on the Nehari manifold.
double project_t(const NormTriple& t);
/// Nehari residual a_bar s^2 + b s^{2~} - c s^{2*} at scaling s.
double nehari_residual(const NormTriple& t, double s);
/// (1/2) a_bar s^2 + (1/2~) b s^{2~} - (1/2*) c s^{2*}.
double phi_along_ray(const NormTriple& t, double s);

double psi(const NormTriple& t);
double psi_delta_form(const NormTriple& t);
double psi_direct(const NormTriple& t);

double big_I(const NormTriple& t);
double big_I_delta_form(const NormTriple& t);
double big_I_product_form(const NormTriple& t);

double lower_bound(const NormTriple& t);
/// I/beta as a function of delta (beta = 1).
double lambda_bracket(int N, double delta);
/// Smallest cbar with Lambda(delta) <= 1 + (4/2~) delta + cbar delta^2 for all delta > 0.
double upper_bound_constant(int N);
double upper_bound(const NormTriple& t, double cbar);

/// Partial derivatives of I with respect to (a_bar, b, c).
struct NehariPartials {
  double I;
  double psi;
  double t;
  double dI_da;
  double dI_db;
  double dI_dc;
};
NehariPartials nehari_partials(const NormTriple& t);

struct HParams {
  double beta_bar;
  double gamma_bar;
  double mu_mass;
  double nu_mass;
  int N;
};

double h_function(const HParams& p, double x);
/// h(x)^{2/N} / (4 (2~)^{2/N}).
double h_level(const HParams& p, double x);

struct EndpointCheck {
  bool at_endpoint;
  double argmin;
  double min_value;
};
EndpointCheck h_endpoint_minimum_check(const HParams& p, int grid_points);

/// (lhs, rhs) of (eta(eta-1)/2) z^2 - C|z| + 1 <= (z+1)^eta, C = 1 + eta(eta-1)/2.
std::pair<double, double> calculus_inequality(double eta, double z);
/// (lhs, rhs) of (1+z)^{-eta} >= 1 - eta z.
std::pair<double, double> bernoulli_inequality(double eta, double z);

}  // namespace nehari_lab

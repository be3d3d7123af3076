#pragma once

#include <optional>

#include "nehari_lab/rational.hpp"

namespace nehari_lab {

inline constexpr int kMaxDimension = 30;

/// Critical exponents 2* = 2N/(N-2) and 2~ = 2(N-1)/(N-2), kept exact.
struct Exponents {
  explicit Exponents(int n);

  int N;
  Rational two_star;
  Rational two_tilde;

  double star() const { return two_star.value(); }
  double tilde() const { return two_tilde.value(); }
};

struct ProblemParams {
  ProblemParams(int n, double a, double alpha, double radius);

  Exponents exponents;
  double a;
  double alpha;
  double radius;

  int N() const { return exponents.N; }
  double mean_curvature() const { return 1.0 / radius; }
};

double gamma_fn(double x);

/// Area of the unit sphere in R^N.
double sphere_area(int N);
double ball_volume(int N, double R);

/// Best Sobolev constant S and its power S^{N/2}.
double sobolev_S(int N);
double sobolev_S_power(int N);
/// pi N(N-2) (Gamma(N/2)/Gamma(N))^{2/N}.
double sobolev_S_alt(int N);

double talenti_B(int N);

double curvature_A(int N);
double curvature_A_sphere_form(int N);

struct CBar {
  double c1;
  double c2;
};
CBar cbar_coefficients(int N, double H);

/// Ratio between the instanton U(x) used here and V(x) = U(sqrt(N(N-2)) x).
/// Boundary-expansion coefficients computed with V are smaller by this factor.
double instanton_scale_factor(int N);

/// S / 2^{2/N}.
double half_space_threshold(int N);

/// lambda = (alpha + sqrt(alpha^2 + 4a))/2, the positive root of l^2 - alpha l - a.
double constant_solution_lambda(const ProblemParams& p);
double constant_solution_kappa(const ProblemParams& p);
double constant_solution_energy(const ProblemParams& p, double volume);
double I_alpha_of_one(const ProblemParams& p, double volume);

/// max{alpha >= 0 : I_alpha(1) <= S/2^{2/N}} when a <= S/(2|Omega|)^{2/N}.
std::optional<double> amax_constant_bound(int N, double a, double volume);

}  // namespace nehari_lab

#pragma once

#include <span>
#include <string>
#include <vector>

#include "nehari_lab/constants.hpp"

namespace nehari_lab {

/// C * U_{eps,y}, y on the boundary axis (north pole for the ball).
struct InstantonParams {
  double eps;
  double boundary_angle = 0.0;
  double amplitude = 1.0;
};

enum class CapDomain { half_space, ball };

struct CapQuadrature {
  int n_rho = 24;
  int n_theta = 24;
  std::string rule = "gauss-legendre";
  CapDomain domain = CapDomain::ball;
  double R = 1.0;
  /// Absolute tolerance per radial panel.
  double panel_tol = 1e-9;
};

double u_value(double r, int N);
double grad_u_norm(double r, int N);

/// U and its first three radial derivatives.
struct RadialDerivatives {
  double u;
  double d1;
  double d2;
  double d3;
};
RadialDerivatives talenti_derivatives(double r, int N);

/// -Delta U - U^{2*-1} from the closed-form radial derivatives.
double pde_residual(double r, int N);
/// -Delta phi - (2*-1) U^{2*-2} phi for phi = dU_{1,y}/dy_i, evaluated at
/// |x| = r along the direction making angle `angle` with e_i.
double eigenfunction_residual(double r, double angle, int N);

/// Integral of U^q over R^N.
double radial_integral(double q, int N);
/// Integral of |grad U|^2 over R^N.
double radial_gradient_integral(int N);

/// Rescaled bubble at distance d from its center.
double bubble_value(double d, double eps, int N);
double bubble_grad(double d, double eps, int N);

struct CapResult {
  double value;
  double error_estimate;
};

/// Integral over the domain of (C U_{eps,y})^q with y on the boundary.
CapResult cap_integral_checked(const InstantonParams& p, double q, const CapQuadrature& quad, int N);
double cap_integral(const InstantonParams& p, double q, const CapQuadrature& quad, int N);
/// Integral over the domain of |grad(C U_{eps,y})|^2.
CapResult cap_gradient_integral_checked(const InstantonParams& p, const CapQuadrature& quad, int N);
double cap_gradient_integral(const InstantonParams& p, const CapQuadrature& quad, int N);

enum class ScalingRegime { far_field, logarithmic, concentrated };
ScalingRegime scaling_regime(double q, int N);
double scaling_regime_exponent(double q, int N);
/// Fitted log-log slope of |U_{eps,y}|_q^q on the unit ball. At q = N/(N-2)
/// the caller must set log_regime, and the |log eps| factor is divided out.
double scaling_exponent_probe(double q, int N, std::span<const double> eps_list, bool log_regime = false);

struct ExpansionQuantity {
  std::string name;
  std::vector<double> eps;
  std::vector<double> values;
  double c0 = 0.0;
  double c1 = 0.0;
  double expected_c0 = 0.0;
  double expected_c1 = 0.0;
  /// Expected slope for the instanton normalization used here.
  double expected_c1_scaled = 0.0;
  double rel_error = 0.0;
  double rel_error_scaled = 0.0;
};

struct ExpansionReport {
  int N = 5;
  double R = 1.0;
  bool half_space = false;
  ExpansionQuantity grad;
  ExpansionQuantity star;
  ExpansionQuantity tilde;
  ExpansionQuantity ratio;
};

ExpansionReport expansion_suite(int N, double R, std::span<const double> eps_list, bool half_space = false);

double trial_energy(const ProblemParams& params, const InstantonParams& inst, const CapQuadrature& quad);

}  // namespace nehari_lab

#include "nehari_lab/instanton.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "nehari_lab/errors.hpp"
#include "nehari_lab/nehari.hpp"
#include "nehari_lab/quadrature.hpp"

namespace nehari_lab {

namespace {

void require_n(int N) {
  if (N < 3 || N > kMaxDimension) throw DomainError("instanton: N must lie in [3, 30]");
}

double kval(int N) { return static_cast<double>(N) * (N - 2); }

double two_star(int N) { return 2.0 * N / (N - 2.0); }

// Integral of sin^{N-2} over [0, tmax] by an n-point Gauss rule.
double sine_power_integral(double tmax, int N, int n) {
  const GaussRule& g = gauss_legendre(n);
  const double h = 0.5 * tmax;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(std::sin(h * (g.nodes[i] + 1.0)), N - 2);
  return h * s;
}

// Integral of rho^{N-1} f(rho) G(rho) over one radial panel with the given orders.
template <class F>
double panel_sum(const F& f, double a, double b, double R, bool ball, double g_half, int N, int n_rho,
                 int n_theta) {
  const GaussRule& g = gauss_legendre(n_rho);
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < n_rho; ++i) {
    const double rho = m + h * g.nodes[i];
    double G = g_half;
    if (ball) G = sine_power_integral(std::acos(std::min(1.0, rho / (2.0 * R))), N, n_theta);
    s += g.weights[i] * std::pow(rho, N - 1) * f(rho) * G;
  }
  return h * s;
}

template <class F>
void adaptive_panel(const F& f, double a, double b, const CapQuadrature& quad, double g_half, int N,
                    int depth, double& value, double& err) {
  const bool ball = quad.domain == CapDomain::ball;
  const double coarse = panel_sum(f, a, b, quad.R, ball, g_half, N, quad.n_rho, quad.n_theta);
  const double fine = panel_sum(f, a, b, quad.R, ball, g_half, N, 2 * quad.n_rho, 2 * quad.n_theta);
  const double e = std::abs(fine - coarse);
  if (e <= quad.panel_tol || depth >= 24) {
    if (e > quad.panel_tol) throw AccuracyError("cap quadrature: panel error estimate above tolerance");
    value += fine;
    err += e;
    return;
  }
  const double mid = 0.5 * (a + b);
  adaptive_panel(f, a, mid, quad, g_half, N, depth + 1, value, err);
  adaptive_panel(f, mid, b, quad, g_half, N, depth + 1, value, err);
}

// Integral over the domain of f(|x - y|), y on the boundary, f of scale eps.
template <class F>
CapResult cap_profile(const F& f, double eps, const CapQuadrature& quad, int N) {
  require_n(N);
  if (quad.n_rho < 16 || quad.n_theta < 16) throw DomainError("CapQuadrature: node counts must be >= 16");
  if (!(eps > 0.0)) throw DomainError("cap integral: eps must be positive");
  const bool ball = quad.domain == CapDomain::ball;
  if (ball && !(quad.R > 0.0)) throw DomainError("CapQuadrature: radius must be positive");
  const double g_half = sine_power_integral(0.5 * std::numbers::pi, N, 64);

  std::vector<double> bp{0.0};
  double x = eps / 64.0;
  const double upper = ball ? quad.R : eps * std::ldexp(1.0, 44);
  while (x < upper) {
    bp.push_back(x);
    x *= 2.0;
  }
  if (ball) {
    // Refine toward rho = 2R where the angular range closes like a square root.
    for (int k = 0; k <= 30; ++k) bp.push_back(2.0 * quad.R - quad.R * std::ldexp(1.0, -k));
    bp.push_back(2.0 * quad.R);
  } else {
    bp.push_back(upper);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  double value = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) adaptive_panel(f, bp[i], bp[i + 1], quad, g_half, N, 0, value, err);

  if (!ball) {
    // Power-law tail beyond the last breakpoint.
    const double L = upper;
    const double f1 = f(L);
    const double f2 = f(2.0 * L);
    if (f1 > 0.0 && f2 > 0.0) {
      const double m = std::log2(f2 / f1);
      if (m + N >= 0.0) throw DomainError("cap integral: integrand not integrable on the half space");
      value += f1 * std::pow(L, N) / (-(m + N)) * g_half;
    }
  }
  const double w = sphere_area(N - 1);
  return {w * value, w * err};
}

}  // namespace

double u_value(double r, int N) {
  require_n(N);
  const double k = kval(N);
  return std::pow(k / (k + r * r), 0.5 * (N - 2));
}

double grad_u_norm(double r, int N) {
  require_n(N);
  const double k = kval(N);
  return (N - 2.0) * r * std::pow(k, 0.5 * (N - 2)) * std::pow(k + r * r, -0.5 * N);
}

RadialDerivatives talenti_derivatives(double r, int N) {
  require_n(N);
  const double k = kval(N);
  const double p = 0.5 * (N - 2);
  const double X = 1.0 + r * r / k;
  RadialDerivatives d{};
  d.u = std::pow(X, -p);
  d.d1 = -p * (2.0 * r / k) * std::pow(X, -p - 1.0);
  d.d2 = -(2.0 * p / k) * std::pow(X, -p - 1.0) + p * (p + 1.0) * (4.0 * r * r / (k * k)) * std::pow(X, -p - 2.0);
  d.d3 = (2.0 * p / k) * (p + 1.0) * (2.0 * r / k) * std::pow(X, -p - 2.0) +
         p * (p + 1.0) * (8.0 * r / (k * k)) * std::pow(X, -p - 2.0) -
         p * (p + 1.0) * (p + 2.0) * (4.0 * r * r / (k * k)) * (2.0 * r / k) * std::pow(X, -p - 3.0);
  return d;
}

double pde_residual(double r, int N) {
  if (!(r > 0.0)) throw DomainError("pde_residual: r must be positive");
  const RadialDerivatives d = talenti_derivatives(r, N);
  const double lap = d.d2 + (N - 1.0) / r * d.d1;
  return -lap - std::pow(d.u, two_star(N) - 1.0);
}

double eigenfunction_residual(double r, double angle, int N) {
  if (!(r > 0.0)) throw DomainError("eigenfunction_residual: r must be positive");
  // phi = -dU/dx_i = f(r) cos(angle) with f = -U'. A degree-one harmonic
  // times f has Laplacian (f'' + (N-1) f'/r - (N-1) f/r^2) cos(angle).
  const RadialDerivatives d = talenti_derivatives(r, N);
  const double f = -d.d1;
  const double f1 = -d.d2;
  const double f2 = -d.d3;
  const double c = std::cos(angle);
  const double lap = (f2 + (N - 1.0) / r * f1 - (N - 1.0) / (r * r) * f) * c;
  return -lap - (two_star(N) - 1.0) * std::pow(d.u, two_star(N) - 2.0) * f * c;
}

double radial_integral(double q, int N) {
  require_n(N);
  if (!(q > N / (N - 2.0))) throw DomainError("radial_integral: q must exceed N/(N-2)");
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate(
      [&](double r) {
        if (r <= 0.0) return 0.0;
        const double k = kval(N);
        return std::exp((N - 1) * std::log(r) + 0.5 * q * (N - 2) * (std::log(k) - std::log(k + r * r)));
      },
      0.0,
      std::numeric_limits<double>::infinity(), 1e-13, &err, &l1);
  if (err > 1e-9 * l1) throw AccuracyError("radial_integral: quadrature did not converge");
  return sphere_area(N) * v;
}

double radial_gradient_integral(int N) {
  require_n(N);
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate(
      [&](double r) {
        if (r <= 0.0) return 0.0;
        const double k = kval(N);
        // r^{N-1} |grad U|^2 with |grad U| = (N-2) r k^{(N-2)/2} (k + r^2)^{-N/2}.
        return (N - 2.0) * (N - 2.0) *
               std::exp((N + 1) * std::log(r) + (N - 2) * std::log(k) - N * std::log(k + r * r));
      },
      0.0, std::numeric_limits<double>::infinity(), 1e-13, &err, &l1);
  if (err > 1e-9 * l1) throw AccuracyError("radial_gradient_integral: quadrature did not converge");
  return sphere_area(N) * v;
}

double bubble_value(double d, double eps, int N) {
  return std::pow(eps, -0.5 * (N - 2)) * u_value(d / eps, N);
}

double bubble_grad(double d, double eps, int N) {
  return std::pow(eps, -0.5 * N) * grad_u_norm(d / eps, N);
}

CapResult cap_integral_checked(const InstantonParams& p, double q, const CapQuadrature& quad, int N) {
  if (!(q > 0.0)) throw DomainError("cap_integral: q must be positive");
  const double eps = p.eps;
  const double scale = std::pow(std::abs(p.amplitude), q);
  CapResult r = cap_profile([&](double rho) { return std::pow(bubble_value(rho, eps, N), q); }, eps, quad, N);
  return {scale * r.value, scale * r.error_estimate};
}

double cap_integral(const InstantonParams& p, double q, const CapQuadrature& quad, int N) {
  return cap_integral_checked(p, q, quad, N).value;
}

CapResult cap_gradient_integral_checked(const InstantonParams& p, const CapQuadrature& quad, int N) {
  const double eps = p.eps;
  const double scale = p.amplitude * p.amplitude;
  CapResult r = cap_profile(
      [&](double rho) {
        const double g = bubble_grad(rho, eps, N);
        return g * g;
      },
      eps, quad, N);
  return {scale * r.value, scale * r.error_estimate};
}

double cap_gradient_integral(const InstantonParams& p, const CapQuadrature& quad, int N) {
  return cap_gradient_integral_checked(p, quad, N).value;
}

ScalingRegime scaling_regime(double q, int N) {
  const double crit = N / (N - 2.0);
  if (std::abs(q - crit) <= 1e-12 * crit) return ScalingRegime::logarithmic;
  return q < crit ? ScalingRegime::far_field : ScalingRegime::concentrated;
}

double scaling_regime_exponent(double q, int N) {
  switch (scaling_regime(q, N)) {
    case ScalingRegime::far_field:
      return 0.5 * q * (N - 2);
    case ScalingRegime::logarithmic:
      return 0.5 * N;
    case ScalingRegime::concentrated:
      break;
  }
  return N * (1.0 - q / two_star(N));
}

namespace {

void require_geometric(std::span<const double> eps, std::size_t min_count, double cap) {
  if (eps.size() < min_count) throw DomainError("eps_list: too few values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || eps[i] > cap) throw DomainError("eps_list: values must lie in (0, cap]");
  }
  const double ratio = eps[1] / eps[0];
  if (std::abs(ratio - 1.0) < 1e-9) throw DomainError("eps_list: values must be distinct");
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (std::abs(eps[i] / eps[i - 1] / ratio - 1.0) > 1e-9) throw DomainError("eps_list: not geometric");
  }
}

}  // namespace

double scaling_exponent_probe(double q, int N, std::span<const double> eps_list, bool log_regime) {
  require_n(N);
  require_geometric(eps_list, 4, 0.1);
  const ScalingRegime regime = scaling_regime(q, N);
  if (regime == ScalingRegime::logarithmic && !log_regime) {
    throw DomainError("scaling_exponent_probe: q = N/(N-2) requires the logarithmic regime flag");
  }
  CapQuadrature quad;
  quad.domain = CapDomain::ball;
  quad.R = 1.0;
  const std::size_t n = eps_list.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double e : eps_list) {
    double v = cap_integral(InstantonParams{e}, q, quad, N);
    if (regime == ScalingRegime::logarithmic) v /= std::abs(std::log(e));
    const double x = std::log(e);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

void extrapolate(ExpansionQuantity& q, double scale) {
  // Three smallest levels give the quadratic model; the next triple, if any,
  // checks that the first-order coefficient is stable.
  const double x[3] = {q.eps[0], q.eps[1], q.eps[2]};
  const double y[3] = {q.values[0], q.values[1], q.values[2]};
  const Quadratic fit = fit_quadratic(x, y);
  q.c0 = fit.c0;
  q.c1 = fit.c1;
  if (q.eps.size() >= 4) {
    const double x2[3] = {q.eps[1], q.eps[2], q.eps[3]};
    const double y2[3] = {q.values[1], q.values[2], q.values[3]};
    const Quadratic alt = fit_quadratic(x2, y2);
    if (std::abs(alt.c1 - fit.c1) > 0.05 * std::max(std::abs(fit.c1), scale)) {
      throw AccuracyError("expansion_suite: extrapolation of " + q.name + " is not converging");
    }
  }
  auto rel = [&](double expected) {
    const double d = std::abs(q.c1 - expected);
    return expected != 0.0 ? d / std::abs(expected) : d / scale;
  };
  q.rel_error = rel(q.expected_c1);
  q.rel_error_scaled = rel(q.expected_c1_scaled);
}

}  // namespace

ExpansionReport expansion_suite(int N, double R, std::span<const double> eps_list, bool half_space) {
  if (N < 5 || N > kMaxDimension) throw DomainError("expansion_suite: N must lie in [5, 30]");
  if (!(R > 0.0)) throw DomainError("expansion_suite: R must be positive");
  std::vector<double> eps(eps_list.begin(), eps_list.end());
  std::sort(eps.begin(), eps.end());
  require_geometric(eps, 3, 0.05 * R);

  const double Sp = sobolev_S_power(N);
  const double S = sobolev_S(N);
  const double B = talenti_B(N);
  const double tt = 2.0 * (N - 1.0) / (N - 2.0);
  const double H = half_space ? 0.0 : 1.0 / R;
  const CBar cb = cbar_coefficients(N, H);
  const double A = curvature_A(N);
  const double f = instanton_scale_factor(N);

  CapQuadrature quad;
  quad.domain = half_space ? CapDomain::half_space : CapDomain::ball;
  quad.R = R;

  ExpansionReport rep;
  rep.N = N;
  rep.R = R;
  rep.half_space = half_space;
  rep.grad.name = "grad";
  rep.star.name = "star";
  rep.tilde.name = "tilde";
  rep.ratio.name = "ratio";
  for (double e : eps) {
    const InstantonParams ip{e};
    const double g = cap_gradient_integral(ip, quad, N);
    const double s = cap_integral(ip, two_star(N), quad, N);
    const double t = cap_integral(ip, tt, quad, N);
    for (ExpansionQuantity* q : {&rep.grad, &rep.star, &rep.tilde, &rep.ratio}) q->eps.push_back(e);
    rep.grad.values.push_back(g);
    rep.star.values.push_back(s);
    rep.tilde.values.push_back(t);
    rep.ratio.values.push_back(g / std::pow(s, 2.0 / two_star(N)));
  }
  rep.grad.expected_c0 = 0.5 * Sp;
  rep.grad.expected_c1 = -cb.c1;
  rep.grad.expected_c1_scaled = -cb.c1 * f;
  rep.star.expected_c0 = 0.5 * Sp;
  rep.star.expected_c1 = -cb.c2;
  rep.star.expected_c1_scaled = -cb.c2 * f;
  rep.tilde.expected_c0 = 0.0;
  rep.tilde.expected_c1 = 0.5 * tt * B;
  rep.tilde.expected_c1_scaled = 0.5 * tt * B;
  rep.ratio.expected_c0 = S / std::pow(2.0, 2.0 / N);
  rep.ratio.expected_c1 = -std::pow(2.0, (N - 2.0) / N) * S * H * A;
  rep.ratio.expected_c1_scaled = rep.ratio.expected_c1 * f;

  extrapolate(rep.grad, 0.5 * Sp);
  extrapolate(rep.star, 0.5 * Sp);
  extrapolate(rep.tilde, 0.5 * tt * B);
  extrapolate(rep.ratio, rep.ratio.expected_c0);
  return rep;
}

double trial_energy(const ProblemParams& params, const InstantonParams& inst, const CapQuadrature& quad) {
  const int N = params.N();
  CapQuadrature q = quad;
  q.R = params.radius;
  const double grad = cap_gradient_integral(inst, q, N);
  const double l2 = cap_integral(inst, 2.0, q, N);
  const double tl = cap_integral(inst, params.exponents.tilde(), q, N);
  const double st = cap_integral(inst, params.exponents.star(), q, N);
  return big_I(NormTriple{grad + params.a * l2, params.alpha * tl, st, N});
}

}  // namespace nehari_lab

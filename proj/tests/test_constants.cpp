#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nehari_lab/constants.hpp"
#include "nehari_lab/errors.hpp"
#include "nehari_lab/nehari.hpp"

using namespace nehari_lab;

namespace {

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

// Bisection on a kappa = kappa^{2*-1} - alpha kappa^{2~-1}, independent of the closed form.
double kappa_by_bisection(int N, double a, double alpha) {
  const double s = 2.0 * N / (N - 2.0);
  const double t = 2.0 * (N - 1.0) / (N - 2.0);
  auto f = [&](double k) { return std::pow(k, s - 2.0) - alpha * std::pow(k, t - 2.0) - a; };
  double lo = 1e-8, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 300; ++i) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("exponent identities hold exactly") {
  for (int N = 5; N <= kMaxDimension; ++N) {
    const Exponents e(N);
    CHECK(e.two_tilde - Rational(2) == (e.two_star - Rational(2)) / Rational(2));
    CHECK(Rational(1) / e.two_tilde * (Rational(1) + e.two_star / Rational(2)) == Rational(1));
  }
  CHECK_THROWS_AS(Exponents(4), DomainError);
  CHECK_THROWS_AS(Exponents(31), DomainError);
}

TEST_CASE("gamma function") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-14);
  CHECK(rel(gamma_fn(5.0), 24.0) < 1e-14);
  // Gamma(x+1) = x Gamma(x) across [0.5, 50].
  for (double x = 0.5; x < 49.0; x += 0.37) CHECK(rel(gamma_fn(x + 1.0), x * gamma_fn(x)) < 1e-13);
  CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
  CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("sphere area") {
  CHECK(rel(sphere_area(2), 2.0 * std::numbers::pi) < 1e-14);
  CHECK(rel(sphere_area(3), 4.0 * std::numbers::pi) < 1e-14);
  CHECK(rel(sphere_area(5), 26.3189450695716229835586) < 1e-14);
  CHECK_THROWS_AS(sphere_area(1), DomainError);
  for (int N = 5; N <= 12; ++N) {
    const double lhs = sphere_area(N - 1) / sphere_area(N);
    const double rhs = gamma_fn(0.5 * N) / gamma_fn(0.5 * (N - 1)) / std::sqrt(std::numbers::pi);
    CHECK(rel(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("Sobolev constant and instanton energy") {
  CHECK(rel(sobolev_S(5), 14.8119117200059340001583804) < 1e-13);
  CHECK(rel(sobolev_S_power(5), 844.360264762738559693780962) < 1e-13);
  CHECK(rel(sobolev_S(6), 19.2594566654732061284114523) < 1e-13);
  CHECK(rel(sobolev_S(7), 23.6515157009824201761748034) < 1e-13);
  CHECK(rel(sobolev_S(8), 28.0105275600395707918433446) < 1e-13);
  for (int N = 3; N <= 20; ++N) {
    CHECK(sobolev_S(N) > 0.0);
    CHECK(rel(sobolev_S(N), sobolev_S_alt(N)) < 1e-12);
  }
  for (int N = 5; N <= 12; ++N) CHECK(rel(talenti_B(N), sobolev_S_power(N)) < 1e-12);
  CHECK_THROWS_AS(sobolev_S(2), DomainError);
  CHECK(rel(half_space_threshold(5), 11.2253299878512595600653) < 1e-13);
}

TEST_CASE("curvature constant") {
  CHECK(rel(curvature_A(5), 1.6 / std::numbers::pi) < 1e-14);
  for (int N = 5; N <= 12; ++N) {
    CHECK(curvature_A(N) > 0.0);
    CHECK(rel(curvature_A(N), curvature_A_sphere_form(N)) < 1e-12);
  }
  CHECK_THROWS_AS(curvature_A(4), DomainError);
}

TEST_CASE("boundary expansion coefficients") {
  const CBar c = cbar_coefficients(5, 1.0);
  CHECK(rel(c.c1, 645.0437274593825) < 1e-12);
  CHECK(rel(c.c2, 358.35762636632353) < 1e-12);
  const CBar z = cbar_coefficients(5, 0.0);
  CHECK(z.c1 == 0.0);
  CHECK(z.c2 == 0.0);
  for (int N = 5; N <= 10; ++N) {
    const CBar a = cbar_coefficients(N, 0.7);
    const CBar b = cbar_coefficients(N, 1.4);
    CHECK(rel(b.c1, 2.0 * a.c1) < 1e-14);
    CHECK(rel(b.c2, 2.0 * a.c2) < 1e-14);
  }
  // First-order Taylor expansion of (Sp/2 - c1 e)/(Sp/2 - c2 e)^{2/2*} matches
  // S/2^{2/N} - 2^{(N-2)/N} S H A e.
  for (int N = 5; N <= 10; ++N) {
    const double H = 1.3;
    const CBar k = cbar_coefficients(N, H);
    const double Sp = sobolev_S_power(N);
    const double S = sobolev_S(N);
    const double q = (N - 2.0) / N;
    auto ratio = [&](double e) { return (0.5 * Sp - k.c1 * e) / std::pow(0.5 * Sp - k.c2 * e, q); };
    const double h = 1e-6;
    const double slope = (ratio(h) - ratio(-h)) / (2.0 * h);
    CHECK(rel(ratio(0.0), S / std::pow(2.0, 2.0 / N)) < 1e-12);
    CHECK(rel(slope, -std::pow(2.0, q) * S * H * curvature_A(N)) < 1e-7);
  }
}

TEST_CASE("constant solution") {
  CHECK(constant_solution_kappa(ProblemParams(6, 16.0, 0.0, 1.0)) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(constant_solution_kappa(ProblemParams(5, 1.0, 0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const double k = constant_solution_kappa(ProblemParams(5, 1.0, 1.0, 1.0));
  CHECK(rel(k, 2.05817102727149225032198) < 1e-14);
  CHECK(rel(k, kappa_by_bisection(5, 1.0, 1.0)) < 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(1e-6, 10.0), ual(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const ProblemParams p(5 + i % 4, ua(rng), ual(rng), 1.0);
    const double kap = constant_solution_kappa(p);
    const double lhs = p.a * kap;
    const double rhs = std::pow(kap, p.exponents.star() - 1.0) - p.alpha * std::pow(kap, p.exponents.tilde() - 1.0);
    const double scale = std::pow(kap, p.exponents.star() - 1.0);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("constant solution energy") {
  for (double alpha : {0.0, 0.5, 2.0}) {
    const ProblemParams p(5, 1.0, alpha, 1.0);
    const double kap = constant_solution_kappa(p);
    const double vol = 1.0;
    const double direct = vol * (0.5 * p.a * kap * kap + p.alpha * std::pow(kap, p.exponents.tilde()) / p.exponents.tilde() -
                                 std::pow(kap, p.exponents.star()) / p.exponents.star());
    CHECK(rel(constant_solution_energy(p, vol), direct) < 1e-12);
    CHECK(constant_solution_energy(p, vol) > 0.0);
    CHECK(rel(constant_solution_energy(p, 2.0 * vol), 2.0 * constant_solution_energy(p, vol)) < 1e-14);
  }
}

TEST_CASE("I_alpha of the constant function") {
  const double vol = ball_volume(5, 1.0);
  CHECK(rel(vol, 5.26378901391432459671172853) < 1e-14);
  for (double alpha : {0.0, 0.3, 1.0, 4.0}) {
    const ProblemParams p(5, 1.0, alpha, 1.0);
    const NormTriple t{p.a * vol, p.alpha * vol, vol, 5};
    CHECK(rel(I_alpha_of_one(p, vol), big_I(t)) < 1e-10);
    CHECK(rel(I_alpha_of_one(p, 3.0 * vol), std::pow(3.0, 0.4) * I_alpha_of_one(p, vol)) < 1e-13);
  }
  CHECK(rel(I_alpha_of_one(ProblemParams(5, 1.0, 0.0, 1.0), vol), std::pow(vol, 0.4)) < 1e-13);
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = I_alpha_of_one(ProblemParams(5, 1.0, 0.05 * i, 1.0), vol);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("constant-function threshold bound") {
  const auto amax = amax_constant_bound(5, 1.0, ball_volume(5, 1.0));
  REQUIRE(amax.has_value());
  CHECK(rel(*amax, 2.45956231400263963436621) < 1e-12);
  CHECK_FALSE(amax_constant_bound(5, 100.0, ball_volume(5, 1.0)).has_value());
}

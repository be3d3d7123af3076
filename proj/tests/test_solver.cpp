#include <cmath>
#include <random>

#include "doctest.h"
#include "nehari_lab/errors.hpp"
#include "nehari_lab/solver.hpp"

using namespace nehari_lab;

namespace {

std::shared_ptr<const AxiGrid> grid(int n, double stretch, int N = 5) {
  GridSpec s;
  s.N = N;
  s.n_r = n;
  s.n_theta = n;
  s.stretch_r = stretch;
  s.stretch_theta = stretch;
  return build_grid(s);
}

Field random_field(std::shared_ptr<const AxiGrid> g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double c1 = U(rng), c2 = U(rng), c3 = U(rng);
  const double e = std::max(0.05, min_resolvable_eps(*g)) * (2.0 + U(rng));
  Field b = interpolate_instanton(g, {e});
  Field f(g);
  for (int i = 0; i < g->n_r(); ++i)
    for (int j = 0; j < g->n_theta(); ++j) {
      const double r = g->r()[i], t = g->theta()[j];
      const std::size_t k = g->index(i, j);
      f.values[k] = 1.0 + 0.3 * c1 * r * std::cos(t) + 0.2 * c2 * r * r + 0.2 * c3 * std::cos(2.0 * t) * r +
                    0.5 * std::pow(e, 1.5) * b.values[k];
    }
  return f;
}

double vol() { return ball_volume(5, 1.0); }

}  // namespace

TEST_CASE("evaluate_I basics") {
  auto g = grid(48, 2.0);
  const ProblemParams p(5, 1.0, 0.8, 1.0);
  CHECK(std::abs(evaluate_I(Field(g, 1.0), p) / I_alpha_of_one(p, vol()) - 1.0) < 1e-8);
  std::mt19937_64 rng(3);
  Field f = random_field(g, rng);
  Field f7 = f;
  for (double& v : f7.values) v *= 7.0;
  CHECK(std::abs(evaluate_I(f7, p) / evaluate_I(f, p) - 1.0) < 1e-12);
  CHECK_THROWS_AS(evaluate_I(Field(g, 0.0), p), DegenerateInputError);
  CHECK_THROWS_AS(evaluate_I(Field(g, 1.0), ProblemParams(6, 1.0, 0.8, 1.0)), ValidationError);
}

TEST_CASE("a concentrated instanton beats the half-space threshold at alpha = 0") {
  auto g = grid(128, 6.0);
  const ProblemParams p(5, 1.0, 0.0, 1.0);
  const double I = evaluate_I(interpolate_instanton(g, {0.02}), p);
  CHECK(I < half_space_threshold(5));
}

TEST_CASE("analytic gradient matches central differences") {
  auto g = grid(40, 2.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  int checked = 0;
  for (int field = 0; field < 5; ++field) {
    const ProblemParams p(5, 0.5 + field * 0.4, 0.6 * field, 1.0);
    Field u = random_field(g, rng);
    const Field grad = gradient_I(u, p);
    double un = 0.0;
    for (double v : u.values) un += v * v;
    un = std::sqrt(un);
    for (int dir = 0; dir < 20; ++dir) {
      std::vector<double> v(u.values.size());
      double vn = 0.0;
      for (double& x : v) {
        x = n01(rng);
        vn += x * x;
      }
      vn = std::sqrt(vn);
      double an = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] /= vn;
        an += grad.values[k] * v[k];
      }
      const double h = 1e-5 * un;
      auto at = [&](double s) {
        Field w = u;
        for (std::size_t k = 0; k < v.size(); ++k) w.values[k] += s * v[k];
        return evaluate_I(w, p);
      };
      // Fourth-order central stencil.
      const double fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
      CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
      ++checked;
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("constant solution is critical and the scaling direction is flat") {
  auto g = grid(48, 2.0);
  const ProblemParams p(5, 1.0, 1.0, 1.0);
  const Field k(g, constant_solution_kappa(p));
  SolveConfig cfg;
  CHECK(gradient_norm(k, p) <= 10.0 * cfg.grad_tol);
  std::mt19937_64 rng(5);
  const Field u = random_field(g, rng);
  const Field gu = gradient_I(u, p);
  double d = 0.0, gn = 0.0, un = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    d += gu.values[i] * u.values[i];
    gn += gu.values[i] * gu.values[i];
    un += u.values[i] * u.values[i];
  }
  CHECK(std::abs(d) <= 1e-10 * std::sqrt(gn * un));
}

TEST_CASE("H1 operator inverse") {
  auto g = grid(48, 4.0);
  const H1Operator P(g, 1.3);
  std::vector<double> x(g->size()), b(x.size()), y(x.size());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double& v : x) v = U(rng);
  P.apply(x, b);
  P.solve(b, y);
  double e = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) e = std::max(e, std::abs(y[k] - x[k]));
  CHECK(e < 1e-8);
}

TEST_CASE("minimize at alpha = 0 on a coarse grid") {
  auto g = grid(48, 3.0);
  const ProblemParams p(5, 1.0, 0.0, 1.0);
  SolveConfig cfg;
  const SolveResult r = minimize(p, cfg, g);
  CHECK(r.S_alpha_est <= I_alpha_of_one(p, vol()) * (1.0 + 1e-10));
  CHECK(r.S_alpha_est < half_space_threshold(5) * (1.0 + 1e-3));
  CHECK(r.S_alpha_est == doctest::Approx(big_I(r.triple)).epsilon(1e-14));
  for (const StartSummary& s : r.starts) CHECK(r.S_alpha_est <= s.initial_I);
  CHECK(r.converged);
  CHECK(r.el_residual <= 10.0 * cfg.grad_tol);
}

TEST_CASE("minimize above the constant bound finds a boundary bubble") {
  auto g = grid(96, 6.0);
  const ProblemParams p(5, 1.0, 3.5, 1.0);
  SolveConfig cfg;
  cfg.n_starts = 1;
  const SolveResult r = minimize(p, cfg, g);
  CHECK(r.S_alpha_est < I_alpha_of_one(p, vol()));
  for (const StartSummary& s : r.starts) CHECK(r.S_alpha_est <= s.initial_I);
  CHECK(r.diagnostics.boundary_flag);
  CHECK(r.diagnostics.delta_M == std::pow(r.diagnostics.M, -2.0 / 3.0));
  REQUIRE(r.diagnostics.fit.ok);
  CHECK(r.diagnostics.fit.w_norm >= 0.0);
  CHECK(r.diagnostics.fit.w_norm_rel < 0.2);
  const double ratio = r.diagnostics.fit.params.eps / r.diagnostics.delta_M;
  MESSAGE("fit eps / delta_M = " << ratio);
  if (r.converged) CHECK(r.el_residual <= 10.0 * cfg.grad_tol);
}

TEST_CASE("determinism across runs and thread counts") {
  auto g = grid(40, 3.0);
  const ProblemParams p(5, 1.0, 3.0, 1.0);
  SolveConfig cfg;
  cfg.n_starts = 2;
  cfg.seed = 42;
  const SolveResult a = minimize(p, cfg, g);
  const SolveResult b = minimize(p, cfg, g);
  cfg.threads = 3;
  const SolveResult c = minimize(p, cfg, g);
  CHECK(a.S_alpha_est == b.S_alpha_est);
  CHECK(a.S_alpha_est == c.S_alpha_est);
  CHECK(a.minimizer.values == c.minimizer.values);
  cfg.threads = 1;
  cfg.seed = 43;
  const auto s1 = default_starts(p, cfg, g);
  cfg.seed = 42;
  const auto s2 = default_starts(p, cfg, g);
  CHECK(s1.back().field.values != s2.back().field.values);
}

TEST_CASE("alpha sweep") {
  auto g = grid(48, 4.0);
  const ProblemParams base(5, 1.0, 0.0, 1.0);
  SolveConfig cfg;
  cfg.n_starts = 1;
  const std::vector<double> alphas = {0.0, 1.0, 2.0, 2.4, 3.0, 4.0};
  const SweepResult s = sweep_alpha(base, alphas, cfg, g);
  REQUIRE(s.results.size() == alphas.size());
  CHECK(s.violations.empty());
  for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
    CHECK(s.results[k].S_alpha_est <= s.results[k + 1].S_alpha_est + 1e-6);
  }
  const SolveResult r0 = minimize(base, cfg, g);
  CHECK(s.results[0].S_alpha_est == doctest::Approx(r0.S_alpha_est).epsilon(1e-12));
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const ProblemParams p(5, 1.0, alphas[k], 1.0);
    CHECK(s.results[k].S_alpha_est <= I_alpha_of_one(p, vol()) * (1.0 + 1e-10));
  }
  const std::vector<double> bad = {1.0, 0.5};
  CHECK_THROWS_AS(sweep_alpha(base, bad, cfg, g), ValidationError);
}

TEST_CASE("alpha0 bisection certificate and two-grid stability") {
  const ProblemParams base(5, 1.0, 0.0, 1.0);
  SolveConfig cfg;
  cfg.n_starts = 0;
  double prev = 0.0;
  for (int n : {48, 72}) {
    auto g = grid(n, 4.0);
    const Alpha0Result r = estimate_alpha0(base, cfg, g, 1.5, 4.0);
    CHECK(r.S_lo < r.target);
    CHECK(r.S_hi >= r.target);
    CHECK(r.alpha_lo <= r.alpha_hat);
    CHECK(r.alpha_hat <= r.alpha_hi);
    CHECK(r.alpha_hi - r.alpha_lo <= cfg.alpha_rel_tol * r.alpha_hat * (1.0 + 1e-12));
    CHECK(r.A_over_R == doctest::Approx(curvature_A(5)));
    REQUIRE(r.amax.has_value());
    CHECK(r.alpha_hat < *r.amax);
    if (prev > 0.0) CHECK(r.alpha_hat >= prev * (1.0 - cfg.tau));
    prev = r.alpha_hat;
  }
  auto g = grid(40, 3.0);
  CHECK_THROWS_AS(estimate_alpha0(base, cfg, g, 0.0, 1.0), BracketError);
  CHECK_THROWS_AS(estimate_alpha0(base, cfg, g, 2.0, 1.0), BracketError);
}

TEST_CASE("instanton fit") {
  auto g = grid(128, 5.0);
  const double eps = 0.01;
  const Field f = interpolate_instanton(g, {eps});
  const InstantonFit fit = fit_instanton(f);
  REQUIRE(fit.ok);
  CHECK(std::abs(fit.params.amplitude - 1.0) < 1e-3);
  CHECK(std::abs(fit.params.eps / eps - 1.0) < 1e-3);
  CHECK(fit.w_norm_rel < 1e-4);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field noisy = f;
  for (double& v : noisy.values) v *= 1.0 + 0.01 * U(rng);
  const InstantonFit nf = fit_instanton(noisy);
  REQUIRE(nf.ok);
  CHECK(std::abs(nf.params.amplitude - 1.0) < 2e-2);

  Field interior(g);
  for (int i = 0; i < g->n_r(); ++i)
    for (int j = 0; j < g->n_theta(); ++j) interior.values[g->index(i, j)] = 2.0 - g->r()[i];
  CHECK_FALSE(fit_instanton(interior).ok);
  CHECK_FALSE(fit_instanton(Field(g, 1.0)).ok);
}

TEST_CASE("solver configuration validation") {
  SolveConfig c;
  c.tau = 0.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolveConfig{};
  c.grad_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolveConfig{};
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "nehari_lab/domain_grid.hpp"
#include "nehari_lab/errors.hpp"
#include "nehari_lab/kernels.hpp"

using namespace nehari_lab;

namespace {

GridSpec spec(int n, double stretch = 0.0, int N = 5, double R = 1.0) {
  GridSpec s;
  s.N = N;
  s.R = R;
  s.n_r = n;
  s.n_theta = n;
  s.stretch_r = stretch;
  s.stretch_theta = stretch;
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("grid weights integrate the ball volume") {
  for (double stretch : {0.0, 3.0, 7.0}) {
    auto g = build_grid(spec(64, stretch));
    CHECK(rel(g->weight_sum(), ball_volume(5, 1.0)) < 1e-8);
    for (double w : g->weights()) CHECK(w > 0.0);
  }
  auto g2 = build_grid(spec(64, 0.0, 5, 2.0));
  CHECK(rel(g2->weight_sum(), 32.0 * ball_volume(5, 1.0)) < 1e-8);
  auto g7 = build_grid(spec(48, 2.0, 7));
  CHECK(rel(g7->weight_sum(), ball_volume(7, 1.0)) < 1e-8);
}

TEST_CASE("grid rejects bad specs") {
  CHECK_THROWS_AS(build_grid(spec(16)), ConfigError);
  CHECK_THROWS_AS(build_grid(spec(64, -1.0)), ConfigError);
  CHECK_THROWS_AS(build_grid(spec(64, 0.0, 4)), ConfigError);
  CHECK_THROWS_AS(build_grid(spec(64, 0.0, 5, 0.0)), ConfigError);
}

TEST_CASE("second moment of r: FE quadrature exact, nodal weights converge") {
  const double exact = sphere_area(5) / 7.0;
  GridSpec s = spec(64);
  s.gauss_order = 4;
  auto g = build_grid(s);
  Field f(g);
  for (int i = 0; i < g->n_r(); ++i)
    for (int j = 0; j < g->n_theta(); ++j) f.values[g->index(i, j)] = g->r()[i];
  MomentWorkspace ws(g);
  CHECK(rel(ws.compute(f.values).l2_sq, exact) < 1e-12);

  double prev = 0.0;
  for (int n : {64, 128, 256, 512}) {
    auto gn = build_grid(spec(n));
    double sum = 0.0;
    for (int i = 0; i < gn->n_r(); ++i)
      for (int j = 0; j < gn->n_theta(); ++j) sum += gn->weights()[gn->index(i, j)] * gn->r()[i] * gn->r()[i];
    const double err = rel(sum, exact);
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("constant fields") {
  auto g = build_grid(spec(64, 2.0));
  const double vol = ball_volume(5, 1.0);
  ProblemParams p(5, 1.0, 1.0, 1.0);
  Field one(g, 1.0);
  const FieldNorms n1 = norms(one, p);
  CHECK(n1.grad_sq == 0.0);
  CHECK(rel(n1.triple.a_bar, vol) < 1e-10);
  CHECK(rel(n1.triple.b, vol) < 1e-10);
  CHECK(rel(n1.triple.c, vol) < 1e-10);

  ProblemParams q(5, 1.3, 0.7, 1.0);
  Field k(g, constant_solution_kappa(q));
  const FieldNorms nk = norms(k, q);
  CHECK(nk.grad_sq == 0.0);
  CHECK(rel(big_I(nk.triple), I_alpha_of_one(q, vol)) < 1e-8);
  const double lam = project_t(nk.triple);
  CHECK(std::abs(lam - 1.0) < 1e-8);
  CHECK(rel(phi_along_ray(nk.triple, 1.0), constant_solution_energy(q, vol)) < 1e-8);

  CHECK_THROWS_AS(norms(Field(g, 0.0), p), DegenerateInputError);
  ProblemParams wrong(6, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(norms(one, wrong), ValidationError);
}

TEST_CASE("interpolated instanton matches cap integrals") {
  const int N = 5;
  InstantonParams inst{0.05};
  auto g = build_grid(spec(512, 2.0));
  Field f = interpolate_instanton(g, inst);
  CHECK(std::abs(f.values[g->index(g->n_r() - 1, 0)] - std::pow(inst.eps, -1.5)) < 1e-9 * std::pow(inst.eps, -1.5));
  ProblemParams p(N, 1.0, 1.0, 1.0);
  const FieldNorms n = norms(f, p);
  CapQuadrature quad;
  const Exponents e(N);
  CHECK(rel(n.grad_sq, cap_gradient_integral(inst, quad, N)) < 0.02);
  CHECK(rel(n.l2_sq, cap_integral(inst, 2.0, quad, N)) < 0.02);
  CHECK(rel(n.tilde_pow, cap_integral(inst, e.tilde(), quad, N)) < 0.02);
  CHECK(rel(n.star_pow, cap_integral(inst, e.star(), quad, N)) < 0.02);
}

TEST_CASE("gradient energy converges at second order for a smooth field") {
  // u = r^2 cos(theta) = x_N r, |grad u|^2 = r^2 (1 + 3 cos^2), integral known in closed form.
  // On the ball in R^5: int r^2 dx + 3 int x_N^2 dx = omega/7 + 3 omega/(5*7).
  const double omega = sphere_area(5);
  const double exact = omega / 7.0 + 3.0 * omega / 35.0;
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    auto g = build_grid(spec(n));
    Field f(g);
    for (int i = 0; i < g->n_r(); ++i)
      for (int j = 0; j < g->n_theta(); ++j)
        f.values[g->index(i, j)] = g->r()[i] * g->r()[i] * std::cos(g->theta()[j]);
    MomentWorkspace ws(g);
    errs.push_back(std::abs(ws.compute(f.values).grad_sq - exact));
  }
  CHECK(std::log2(errs[0] / errs[1]) > 1.8);
  CHECK(std::log2(errs[1] / errs[2]) > 1.8);
}

TEST_CASE("moment gradient matches finite differences") {
  auto g = build_grid(spec(32, 1.5));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.2, 1.5);
  std::vector<double> u(g->size());
  for (double& x : u) x = U(rng);
  MomentWorkspace ws(g);
  const double cg = 0.7, cl = 1.1, ct = -0.4, cs = 0.3;
  auto f = [&](const std::vector<double>& v) {
    const Moments m = ws.compute(v);
    return cg * m.grad_sq + cl * m.l2_sq + ct * m.tilde + cs * m.star;
  };
  f(u);
  std::vector<double> grad(g->size());
  ws.gradient(u, cg, cl, ct, cs, grad);
  for (std::size_t k : {std::size_t{0}, std::size_t{33}, std::size_t{500}, g->size() - 1, g->size() / 2}) {
    const double h = 1e-6;
    std::vector<double> up = u, um = u;
    up[k] += h;
    um[k] -= h;
    const double fd = (f(up) - f(um)) / (2.0 * h);
    CHECK(std::abs(fd - grad[k]) < 1e-6 * (1.0 + std::abs(grad[k])));
  }
}

TEST_CASE("scalar and avx2 kernels agree on grid norms") {
  if (!kernels::supported(kernels::Backend::avx2)) return;
  auto g = build_grid(spec(96, 4.0));
  Field f = interpolate_instanton(g, {0.1, 0.0, 1.0});
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] += 0.01 * std::sin(0.37 * k);
  ProblemParams p(5, 1.0, 1.0, 1.0);
  kernels::select(kernels::Backend::scalar);
  const FieldNorms a = norms(f, p);
  kernels::select(kernels::Backend::avx2);
  const FieldNorms b = norms(f, p);
  kernels::select(kernels::best_available());
  CHECK(rel(b.l2_sq, a.l2_sq) < 1e-13);
  CHECK(rel(b.tilde_pow, a.tilde_pow) < 1e-13);
  CHECK(rel(b.star_pow, a.star_pow) < 1e-13);
}

TEST_CASE("resolution limit") {
  auto g = build_grid(spec(64));
  const double m = min_resolvable_eps(*g);
  CHECK(m > 0.0);
  CHECK_THROWS_AS(interpolate_instanton(g, {0.5 * m}), ResolutionError);
  try {
    interpolate_instanton(g, {0.5 * m});
  } catch (const ResolutionError& e) {
    CHECK(e.min_eps() == doctest::Approx(m));
  }
  CHECK_NOTHROW(interpolate_instanton(g, {m}));
}

TEST_CASE("snapshot output") {
  auto g = build_grid(spec(32));
  Field f(g, 0.5);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string csv = (dir / "nl_snapshot.csv").string(), js = (dir / "nl_snapshot.json").string();
  write_field_snapshot(f, csv, js);
  std::ifstream in(csv);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "r,theta,value");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 32 * 32);
  std::ifstream jin(js);
  const auto h = nlohmann::json::parse(jin);
  CHECK(h["n_r"] == 32);
  std::filesystem::remove(csv);
  std::filesystem::remove(js);
}

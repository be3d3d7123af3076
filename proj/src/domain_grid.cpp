#include "nehari_lab/domain_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "nehari_lab/errors.hpp"
#include "nehari_lab/kernels.hpp"
#include "nehari_lab/quadrature.hpp"

namespace nehari_lab {

namespace {

// sinh(b s)/sinh(b), the identity for b = 0.
double cluster(double s, double b) { return b > 0.0 ? std::sinh(b * s) / std::sinh(b) : s; }

template <class Mu>
Tridiag assemble(const std::vector<double>& x, const Mu& mu, bool derivative, int order) {
  const GaussRule& g = gauss_legendre(order);
  const int n = static_cast<int>(x.size());
  Tridiag t{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
  for (int c = 0; c + 1 < n; ++c) {
    const double h = x[c + 1] - x[c];
    double ll = 0.0, lr = 0.0, rr = 0.0;
    for (int q = 0; q < order; ++q) {
      const double xi = g.nodes[q];
      const double w = 0.5 * h * g.weights[q] * mu(x[c] + 0.5 * h * (1.0 + xi));
      if (derivative) {
        ll += w / (h * h);
        lr -= w / (h * h);
        rr += w / (h * h);
      } else {
        const double a = 0.5 * (1.0 - xi), b = 0.5 * (1.0 + xi);
        ll += w * a * a;
        lr += w * a * b;
        rr += w * b * b;
      }
    }
    t.diag[c] += ll;
    t.diag[c + 1] += rr;
    t.off[c] += lr;
  }
  return t;
}

template <class Mu>
std::vector<double> cell_stiffness(const std::vector<double>& x, const Mu& mu, int order) {
  const GaussRule& g = gauss_legendre(order);
  std::vector<double> a(x.size() - 1, 0.0);
  for (std::size_t c = 0; c + 1 < x.size(); ++c) {
    const double h = x[c + 1] - x[c];
    double s = 0.0;
    for (int q = 0; q < order; ++q) s += 0.5 * h * g.weights[q] * mu(x[c] + 0.5 * h * (1.0 + g.nodes[q]));
    a[c] = s / (h * h);
  }
  return a;
}

template <class Mu>
void fill_axis(GridAxis& ax, int ng, const Mu& mu) {
  const GaussRule& g = gauss_legendre(ng);
  const int n = ax.n_nodes();
  ax.ng = ng;
  ax.phi_left.resize(ng);
  ax.phi_right.resize(ng);
  for (int q = 0; q < ng; ++q) {
    ax.phi_left[q] = 0.5 * (1.0 - g.nodes[q]);
    ax.phi_right[q] = 0.5 * (1.0 + g.nodes[q]);
  }
  ax.gp.clear();
  ax.gp_weight.clear();
  for (int c = 0; c + 1 < n; ++c) {
    const double h = ax.nodes[c + 1] - ax.nodes[c];
    for (int q = 0; q < ng; ++q) {
      const double x = ax.nodes[c] + 0.5 * h * (1.0 + g.nodes[q]);
      ax.gp.push_back(x);
      ax.gp_weight.push_back(0.5 * h * g.weights[q] * mu(x));
    }
  }
}

// Integrals of the 1-D hat functions against the measure.
template <class Mu>
std::vector<double> hat_integrals(const std::vector<double>& x, const Mu& mu) {
  const int order = 12;
  const GaussRule& g = gauss_legendre(order);
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t c = 0; c + 1 < x.size(); ++c) {
    const double h = x[c + 1] - x[c];
    for (int q = 0; q < order; ++q) {
      const double xi = g.nodes[q];
      const double m = 0.5 * h * g.weights[q] * mu(x[c] + 0.5 * h * (1.0 + xi));
      w[c] += m * 0.5 * (1.0 - xi);
      w[c + 1] += m * 0.5 * (1.0 + xi);
    }
  }
  return w;
}

// Y[row] = T X[row] along contiguous rows of length n (tridiagonal in the row index).
void tri_rows(const Tridiag& t, const double* x, double* y, int rows, int n) {
  for (int i = 0; i < rows; ++i) {
    const double* xr = x + static_cast<std::size_t>(i) * n;
    double* yr = y + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      double s = t.diag[j] * xr[j];
      if (j > 0) s += t.off[j - 1] * xr[j - 1];
      if (j + 1 < n) s += t.off[j] * xr[j + 1];
      yr[j] = s;
    }
  }
}

}  // namespace

AxiGrid::AxiGrid(const GridSpec& spec) : spec_(spec) {
  if (spec.n_r < 32 || spec.n_theta < 32) throw ConfigError("build_grid: n_r and n_theta must be >= 32");
  if (spec.N < 5 || spec.N > kMaxDimension) throw ConfigError("build_grid: N must lie in [5, 30]");
  if (!(spec.R > 0.0)) throw ConfigError("build_grid: R must be positive");
  if (!(spec.stretch_r >= 0.0) || !(spec.stretch_theta >= 0.0) || spec.stretch_r > 30.0 || spec.stretch_theta > 30.0) {
    throw ConfigError("build_grid: stretch must lie in [0, 30]");
  }
  if (spec.gauss_order < 2 || spec.gauss_order > 8) throw ConfigError("build_grid: gauss_order must lie in [2, 8]");
  const int N = spec.N;
  const double R = spec.R;
  r_.nodes.resize(spec.n_r);
  for (int i = 0; i < spec.n_r; ++i) {
    const double s = 1.0 - static_cast<double>(i) / (spec.n_r - 1);
    r_.nodes[i] = R * (1.0 - cluster(s, spec.stretch_r));
  }
  r_.nodes.front() = 0.0;
  r_.nodes.back() = R;
  th_.nodes.resize(spec.n_theta);
  for (int j = 0; j < spec.n_theta; ++j) {
    th_.nodes[j] = std::numbers::pi * cluster(static_cast<double>(j) / (spec.n_theta - 1), spec.stretch_theta);
  }
  th_.nodes.front() = 0.0;
  th_.nodes.back() = std::numbers::pi;

  const double omega = sphere_area(N - 1);
  auto mu_r = [N](double r) { return std::pow(r, N - 1); };
  auto mu_r2 = [N](double r) { return std::pow(r, N - 3); };
  auto mu_t = [N, omega](double t) { return omega * std::pow(std::sin(t), N - 2); };
  const int ng = spec.gauss_order;
  fill_axis(r_, ng, mu_r);
  fill_axis(th_, ng, mu_t);
  // The 1-D element matrices are polynomial in r and smooth in theta; a
  // high-order rule makes them exact up to rounding.
  const int order = 10;
  r_.stiff = assemble(r_.nodes, mu_r, true, order);
  r_.cell_stiff = cell_stiffness(r_.nodes, mu_r, order);
  th_.cell_stiff = cell_stiffness(th_.nodes, mu_t, order);
  r_.mass = assemble(r_.nodes, mu_r, false, order);
  r_.mass_inv2 = assemble(r_.nodes, mu_r2, false, order);
  th_.stiff = assemble(th_.nodes, mu_t, true, order);
  th_.mass = assemble(th_.nodes, mu_t, false, order);

  const std::vector<double> wr = hat_integrals(r_.nodes, mu_r);
  const std::vector<double> wt = hat_integrals(th_.nodes, mu_t);
  weights_.resize(size());
  for (int i = 0; i < spec.n_r; ++i) {
    for (int j = 0; j < spec.n_theta; ++j) weights_[index(i, j)] = wr[i] * wt[j];
  }
}

double AxiGrid::weight_sum() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double AxiGrid::pole_spacing() const {
  const auto& r = r_.nodes;
  return std::max(r[r.size() - 1] - r[r.size() - 2], spec_.R * th_.nodes[1]);
}

void AxiGrid::apply_stiffness(std::span<const double> u, std::span<double> y) const {
  // K = D_r^T diag(a) D_r (x) M_theta + B_r (x) D_t^T diag(b) D_t, applied through
  // differences so that constants are annihilated exactly.
  const int nr = n_r(), nt = n_theta();
  std::vector<double> dr(static_cast<std::size_t>(nr - 1) * nt), mr(dr.size());
  for (int c = 0; c + 1 < nr; ++c) {
    const double* u0 = u.data() + index(c, 0);
    const double* u1 = u0 + nt;
    double* d = dr.data() + static_cast<std::size_t>(c) * nt;
    for (int j = 0; j < nt; ++j) d[j] = r_.cell_stiff[c] * (u1[j] - u0[j]);
  }
  tri_rows(th_.mass, dr.data(), mr.data(), nr - 1, nt);
  std::vector<double> dt(static_cast<std::size_t>(nr) * (nt - 1));
  for (int i = 0; i < nr; ++i) {
    const double* ur = u.data() + index(i, 0);
    double* d = dt.data() + static_cast<std::size_t>(i) * (nt - 1);
    for (int c = 0; c + 1 < nt; ++c) d[c] = th_.cell_stiff[c] * (ur[c + 1] - ur[c]);
  }
  const Tridiag& B = r_.mass_inv2;
  std::vector<double> bt(dt.size());
  for (int i = 0; i < nr; ++i) {
    double* o = bt.data() + static_cast<std::size_t>(i) * (nt - 1);
    const double* d0 = dt.data() + static_cast<std::size_t>(i) * (nt - 1);
    for (int c = 0; c + 1 < nt; ++c) o[c] = B.diag[i] * d0[c];
    if (i > 0) {
      for (int c = 0; c + 1 < nt; ++c) o[c] += B.off[i - 1] * d0[c - (nt - 1)];
    }
    if (i + 1 < nr) {
      for (int c = 0; c + 1 < nt; ++c) o[c] += B.off[i] * d0[c + (nt - 1)];
    }
  }
  for (int i = 0; i < nr; ++i) {
    double* yr = y.data() + index(i, 0);
    std::fill(yr, yr + nt, 0.0);
    if (i > 0) {
      const double* m = mr.data() + static_cast<std::size_t>(i - 1) * nt;
      for (int j = 0; j < nt; ++j) yr[j] += m[j];
    }
    if (i + 1 < nr) {
      const double* m = mr.data() + static_cast<std::size_t>(i) * nt;
      for (int j = 0; j < nt; ++j) yr[j] -= m[j];
    }
    const double* o = bt.data() + static_cast<std::size_t>(i) * (nt - 1);
    for (int c = 0; c + 1 < nt; ++c) {
      yr[c] -= o[c];
      yr[c + 1] += o[c];
    }
  }
}

void AxiGrid::apply_mass(std::span<const double> u, std::span<double> y) const {
  const int nr = n_r(), nt = n_theta();
  std::vector<double> t(size());
  tri_rows(th_.mass, u.data(), t.data(), nr, nt);
  const Tridiag& m = r_.mass;
  for (int i = 0; i < nr; ++i) {
    double* yr = y.data() + index(i, 0);
    const double* t0 = t.data() + index(i, 0);
    for (int j = 0; j < nt; ++j) yr[j] = m.diag[i] * t0[j];
    if (i > 0) {
      for (int j = 0; j < nt; ++j) yr[j] += m.off[i - 1] * t0[j - nt];
    }
    if (i + 1 < nr) {
      for (int j = 0; j < nt; ++j) yr[j] += m.off[i] * t0[j + nt];
    }
  }
}

std::shared_ptr<const AxiGrid> build_grid(const GridSpec& spec) { return std::make_shared<const AxiGrid>(spec); }

MomentWorkspace::MomentWorkspace(std::shared_ptr<const AxiGrid> grid) : grid_(std::move(grid)) {
  const Exponents e(grid_->N());
  p_tilde_ = e.tilde();
  p_star_ = e.star();
  const std::size_t ngr = grid_->axis_r().n_gp();
  const std::size_t ngt = grid_->axis_theta().n_gp();
  v_.resize(grid_->n_r() * ngt);
  e_.resize(grid_->n_r() * ngt);
  g_.resize(ngr * ngt);
  gt_.resize(ngr * ngt);
  gs_.resize(ngr * ngt);
  d_.resize(ngr * ngt);
  ku_.resize(grid_->size());
}

Moments MomentWorkspace::compute(std::span<const double> u) {
  const AxiGrid& g = *grid_;
  if (u.size() != g.size()) throw ValidationError("MomentWorkspace: field size does not match grid");
  const GridAxis& ar = g.axis_r();
  const GridAxis& at = g.axis_theta();
  const int nr = g.n_r(), nt = g.n_theta(), ng = ar.ng;
  const std::size_t ngt = at.n_gp();
  for (int i = 0; i < nr; ++i) {
    const double* ur = u.data() + g.index(i, 0);
    double* vr = v_.data() + i * ngt;
    for (int c = 0; c + 1 < nt; ++c) {
      for (int q = 0; q < ng; ++q) vr[c * ng + q] = at.phi_left[q] * ur[c] + at.phi_right[q] * ur[c + 1];
    }
  }
  for (int c = 0; c + 1 < nr; ++c) {
    const double* v0 = v_.data() + c * ngt;
    const double* v1 = v0 + ngt;
    for (int q = 0; q < ng; ++q) {
      double* gr = g_.data() + (static_cast<std::size_t>(c) * ng + q) * ngt;
      const double a = ar.phi_left[q], b = ar.phi_right[q];
      for (std::size_t k = 0; k < ngt; ++k) gr[k] = a * v0[k] + b * v1[k];
    }
  }
  const kernels::PowerSums ps = kernels::active().power_sums(g_.data(), ar.n_gp(), ngt, ar.gp_weight.data(),
                                                             at.gp_weight.data(), p_tilde_, p_star_, gt_.data(),
                                                             gs_.data());
  g.apply_stiffness(u, ku_);
  double grad = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) grad += u[k] * ku_[k];
  return {std::max(grad, 0.0), ps.s2, ps.s_tilde, ps.s_star};
}

void MomentWorkspace::gradient(std::span<const double> u, double c_grad, double c_l2, double c_tilde, double c_star,
                               std::span<double> out) {
  const AxiGrid& g = *grid_;
  const GridAxis& ar = g.axis_r();
  const GridAxis& at = g.axis_theta();
  const int nr = g.n_r(), nt = g.n_theta(), ng = ar.ng;
  const std::size_t ngt = at.n_gp();
  (void)u;
  kernels::active().moment_derivative(g_.data(), gt_.data(), gs_.data(), ar.n_gp(), ngt, ar.gp_weight.data(),
                                      at.gp_weight.data(), 2.0 * c_l2, p_tilde_ * c_tilde, p_star_ * c_star,
                                      d_.data());
  std::fill(e_.begin(), e_.end(), 0.0);
  for (int c = 0; c + 1 < nr; ++c) {
    double* e0 = e_.data() + c * ngt;
    double* e1 = e0 + ngt;
    for (int q = 0; q < ng; ++q) {
      const double* dr = d_.data() + (static_cast<std::size_t>(c) * ng + q) * ngt;
      const double a = ar.phi_left[q], b = ar.phi_right[q];
      for (std::size_t k = 0; k < ngt; ++k) {
        e0[k] += a * dr[k];
        e1[k] += b * dr[k];
      }
    }
  }
  for (int i = 0; i < nr; ++i) {
    const double* er = e_.data() + i * ngt;
    double* o = out.data() + g.index(i, 0);
    const double* kr = ku_.data() + g.index(i, 0);
    for (int j = 0; j < nt; ++j) o[j] = 2.0 * c_grad * kr[j];
    for (int c = 0; c + 1 < nt; ++c) {
      double sl = 0.0, sr = 0.0;
      for (int q = 0; q < ng; ++q) {
        sl += at.phi_left[q] * er[c * ng + q];
        sr += at.phi_right[q] * er[c * ng + q];
      }
      o[c] += sl;
      o[c + 1] += sr;
    }
  }
}

FieldNorms norms(const Field& field, const ProblemParams& params, MomentWorkspace& ws) {
  if (!field.grid || field.grid.get() != &ws.grid()) throw ValidationError("norms: field and workspace grids differ");
  if (field.grid->N() != params.N()) throw ValidationError("norms: grid dimension does not match params");
  if (std::abs(field.grid->R() - params.radius) > 1e-12 * params.radius) {
    throw ValidationError("norms: grid radius does not match params");
  }
  const Moments m = ws.compute(field.values);
  if (!(m.star > 0.0)) throw DegenerateInputError("norms: zero field");
  FieldNorms out{};
  out.grad_sq = m.grad_sq;
  out.l2_sq = m.l2_sq;
  out.tilde_pow = m.tilde;
  out.star_pow = m.star;
  out.triple = NormTriple{m.grad_sq + params.a * m.l2_sq, params.alpha * m.tilde, m.star, params.N()};
  return out;
}

FieldNorms norms(const Field& field, const ProblemParams& params) {
  MomentWorkspace ws(field.grid);
  return norms(field, params, ws);
}

double min_resolvable_eps(const AxiGrid& grid) { return 2.0 * grid.pole_spacing(); }

Field interpolate_instanton(std::shared_ptr<const AxiGrid> grid, const InstantonParams& inst) {
  const double min_eps = min_resolvable_eps(*grid);
  if (!(inst.eps >= min_eps)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "interpolate_instanton: eps = %.6g is not resolvable; minimum is %.6g", inst.eps,
                  min_eps);
    throw ResolutionError(buf, min_eps);
  }
  Field f(grid);
  const int N = grid->N();
  const double R = grid->R();
  for (int i = 0; i < grid->n_r(); ++i) {
    const double r = grid->r()[i];
    for (int j = 0; j < grid->n_theta(); ++j) {
      const double s = std::sin(0.5 * grid->theta()[j]);
      const double d = std::sqrt((R - r) * (R - r) + 4.0 * r * R * s * s);
      f.values[grid->index(i, j)] = inst.amplitude * bubble_value(d, inst.eps, N);
    }
  }
  return f;
}

void write_field_snapshot(const Field& field, const std::string& csv_path, const std::string& json_path) {
  const AxiGrid& g = *field.grid;
  std::ofstream csv(csv_path);
  if (!csv) throw ValidationError("cannot write " + csv_path);
  csv << "r,theta,value\n";
  char buf[96];
  for (int i = 0; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.r()[i], g.theta()[j], field.values[g.index(i, j)]);
      csv << buf;
    }
  }
  nlohmann::json h;
  h["N"] = g.N();
  h["R"] = g.R();
  h["n_r"] = g.n_r();
  h["n_theta"] = g.n_theta();
  h["stretch_r"] = g.spec().stretch_r;
  h["stretch_theta"] = g.spec().stretch_theta;
  h["gauss_order"] = g.spec().gauss_order;
  std::ofstream js(json_path);
  if (!js) throw ValidationError("cannot write " + json_path);
  js << h.dump(2) << "\n";
}

}  // namespace nehari_lab

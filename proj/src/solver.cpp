#include "nehari_lab/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "nehari_lab/errors.hpp"

namespace nehari_lab {

void SolveConfig::validate() const {
  std::string bad;
  auto flag = [&](bool ok, const char* key) {
    if (!ok) bad += bad.empty() ? key : std::string(", ") + key;
  };
  flag(max_iters >= 1, "max_iters");
  flag(grad_tol > 0.0 && std::isfinite(grad_tol), "grad_tol");
  flag(n_starts >= 0, "n_starts");
  flag(armijo_c > 0.0 && armijo_c < 0.5, "armijo_c");
  flag(nonmonotone_memory >= 1, "nonmonotone_memory");
  flag(backtrack > 0.0 && backtrack < 1.0, "backtrack");
  flag(max_backtracks >= 1, "max_backtracks");
  flag(tau > 0.0 && tau < 0.1, "tau");
  flag(alpha_rel_tol > 0.0 && alpha_rel_tol < 1.0, "alpha_rel_tol");
  flag(threads >= 1, "threads");
  if (!bad.empty()) throw ConfigError("invalid solver settings: " + bad);
}

// ---------------------------------------------------------------------------
// H1Operator

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd dense(const Tridiag& t) {
  const int n = static_cast<int>(t.diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = t.diag[i];
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = t.off[i];
  return m;
}

}  // namespace

H1Operator::H1Operator(std::shared_ptr<const AxiGrid> grid, double a) : grid_(std::move(grid)), a_(a) {
  if (!(a > 0.0)) throw DomainError("H1Operator: a must be positive");
  const GridAxis& at = grid_->axis_theta();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(at.stiff), dense(at.mass));
  if (es.info() != Eigen::Success) throw AccuracyError("H1Operator: theta eigenproblem failed");
  const int nt = grid_->n_theta();
  V_.resize(static_cast<std::size_t>(nt) * nt);
  lambda_.resize(nt);
  for (int k = 0; k < nt; ++k) {
    lambda_[k] = std::max(es.eigenvalues()(k), 0.0);
    for (int j = 0; j < nt; ++j) V_[static_cast<std::size_t>(j) * nt + k] = es.eigenvectors()(j, k);
  }
}

void H1Operator::apply(std::span<const double> x, std::span<double> y) const {
  std::vector<double> m(x.size());
  grid_->apply_stiffness(x, y);
  grid_->apply_mass(x, m);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += a_ * m[k];
}

double H1Operator::inner(std::span<const double> x, std::span<const double> y) const {
  std::vector<double> py(y.size());
  apply(y, py);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * py[k];
  return s;
}

void H1Operator::solve(std::span<const double> b, std::span<double> x) const {
  const int nr = grid_->n_r(), nt = grid_->n_theta();
  Eigen::Map<const RowMat> B(b.data(), nr, nt);
  Eigen::Map<const RowMat> V(V_.data(), nt, nt);
  RowMat Y = B * V;
  // Column k: (A_r + lambda_k B_r + a M_r) y = rhs, all k swept together row by row.
  const GridAxis& ar = grid_->axis_r();
  const Tridiag& A = ar.stiff;
  const Tridiag& Bm = ar.mass_inv2;
  const Tridiag& M = ar.mass;
  std::vector<double> cp(static_cast<std::size_t>(nr) * nt);
  for (int i = 0; i < nr; ++i) {
    double* y = Y.data() + static_cast<std::size_t>(i) * nt;
    double* c = cp.data() + static_cast<std::size_t>(i) * nt;
    for (int k = 0; k < nt; ++k) {
      const double d = A.diag[i] + lambda_[k] * Bm.diag[i] + a_ * M.diag[i];
      double denom = d;
      if (i > 0) {
        const double lo = A.off[i - 1] + lambda_[k] * Bm.off[i - 1] + a_ * M.off[i - 1];
        denom -= lo * cp[static_cast<std::size_t>(i - 1) * nt + k];
        y[k] -= lo * Y.data()[static_cast<std::size_t>(i - 1) * nt + k];
      }
      const double up = i + 1 < nr ? A.off[i] + lambda_[k] * Bm.off[i] + a_ * M.off[i] : 0.0;
      c[k] = up / denom;
      y[k] /= denom;
    }
  }
  for (int i = nr - 2; i >= 0; --i) {
    double* y = Y.data() + static_cast<std::size_t>(i) * nt;
    const double* yn = y + nt;
    const double* c = cp.data() + static_cast<std::size_t>(i) * nt;
    for (int k = 0; k < nt; ++k) y[k] -= c[k] * yn[k];
  }
  Eigen::Map<RowMat> X(x.data(), nr, nt);
  X.noalias() = Y * V.transpose();
}

// ---------------------------------------------------------------------------
// Objective

namespace {

struct Eval {
  Moments m;
  NormTriple triple;
  double I;
};

class Objective {
 public:
  Objective(const ProblemParams& p, std::shared_ptr<const AxiGrid> grid) : p_(p), ws_(std::move(grid)) {
    if (ws_.grid().N() != p.N()) throw ValidationError("solver: grid dimension does not match params");
    if (std::abs(ws_.grid().R() - p.radius) > 1e-12 * p.radius) {
      throw ValidationError("solver: grid radius does not match params");
    }
  }

  // I = +inf for a vanishing field.
  Eval eval(std::span<const double> u) {
    Eval e{ws_.compute(u), {}, std::numeric_limits<double>::infinity()};
    e.triple = {e.m.grad_sq + p_.a * e.m.l2_sq, p_.alpha * e.m.tilde, e.m.star, p_.N()};
    if (e.m.star > 0.0 && e.triple.a_bar > 0.0) e.I = big_I(e.triple);
    return e;
  }

  // Gradient at the last evaluated field.
  void gradient(std::span<const double> u, const Eval& e, std::span<double> out) {
    const NehariPartials d = nehari_partials(e.triple);
    ws_.gradient(u, d.dI_da, p_.a * d.dI_da, p_.alpha * d.dI_db, d.dI_dc, out);
  }

  // Weak Euler-Lagrange residual of the field itself (no rescaling).
  void el_operator(std::span<const double> w, std::span<double> out) {
    const Exponents& x = p_.exponents;
    ws_.compute(w);
    ws_.gradient(w, 0.5, 0.5 * p_.a, p_.alpha / x.tilde(), -1.0 / x.star(), out);
  }

 private:
  ProblemParams p_;
  MomentWorkspace ws_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void require_nonzero(const Field& f) {
  if (!f.grid) throw ValidationError("solver: field without grid");
  bool any = false;
  for (double v : f.values) {
    if (!std::isfinite(v)) throw ValidationError("solver: non-finite field value");
    any = any || v != 0.0;
  }
  if (!any) throw DegenerateInputError("solver: zero field");
}

double grad_norm_with(const ProblemParams& p, const Field& f, const H1Operator& P) {
  Objective obj(p, f.grid);
  const Eval e = obj.eval(f.values);
  std::vector<double> g(f.values.size()), d(g.size());
  obj.gradient(f.values, e, g);
  P.solve(g, d);
  // Components that would push a zero node negative are inactive.
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(f.values[k] <= 0.0 && d[k] > 0.0)) s += g[k] * d[k];
  }
  return std::sqrt(std::max(s, 0.0) * e.triple.a_bar) / e.I;
}

double el_residual_with(const ProblemParams& p, const Field& f, const H1Operator& P) {
  Objective obj(p, f.grid);
  const Eval e = obj.eval(f.values);
  const double t = project_t(e.triple);
  std::vector<double> w(f.values.size()), r(w.size()), pr(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = t * f.values[k];
  obj.el_operator(w, r);
  P.solve(r, pr);
  return std::sqrt(std::max(dot(r, pr), 0.0)) / (t * std::sqrt(e.triple.a_bar));
}

// Nodal values of C U_{eps,y} with y the boundary pole at theta = pole.
void bubble_field(const AxiGrid& g, double eps, double pole, std::vector<double>& out) {
  const int N = g.N();
  const double R = g.R();
  out.resize(g.size());
  for (int i = 0; i < g.n_r(); ++i) {
    const double r = g.r()[i];
    for (int j = 0; j < g.n_theta(); ++j) {
      const double s = std::sin(0.5 * (g.theta()[j] - pole));
      const double d = std::sqrt((R - r) * (R - r) + 4.0 * r * R * s * s);
      out[g.index(i, j)] = bubble_value(d, eps, N);
    }
  }
}

}  // namespace

double evaluate_I(const Field& field, const ProblemParams& params) {
  require_nonzero(field);
  Objective obj(params, field.grid);
  const Eval e = obj.eval(field.values);
  if (!std::isfinite(e.I)) throw DegenerateInputError("evaluate_I: degenerate field");
  return e.I;
}

Field gradient_I(const Field& field, const ProblemParams& params) {
  require_nonzero(field);
  Objective obj(params, field.grid);
  const Eval e = obj.eval(field.values);
  if (!std::isfinite(e.I)) throw DegenerateInputError("gradient_I: degenerate field");
  Field g(field.grid);
  obj.gradient(field.values, e, g.values);
  return g;
}

double gradient_norm(const Field& field, const ProblemParams& params) {
  require_nonzero(field);
  const H1Operator P(field.grid, params.a);
  return grad_norm_with(params, field, P);
}

double el_residual(const Field& field, const ProblemParams& params) {
  require_nonzero(field);
  const H1Operator P(field.grid, params.a);
  return el_residual_with(params, field, P);
}

// ---------------------------------------------------------------------------
// Starts

std::vector<StartField> default_starts(const ProblemParams& params, const SolveConfig& config,
                                       std::shared_ptr<const AxiGrid> grid) {
  std::vector<StartField> starts;
  starts.push_back({"constant", Field(grid, 1.0)});
  const double R = grid->R();
  const double e_min = min_resolvable_eps(*grid);
  const double lo = std::max(e_min, std::min(4.0 * e_min, 0.05 * R)), hi = std::max(0.25 * R, 2.0 * lo);
  const double eps[3] = {lo, std::sqrt(lo * hi), hi};
  for (double e : eps) {
    char name[48];
    std::snprintf(name, sizeof name, "instanton(eps=%.3g)", e);
    starts.push_back({name, interpolate_instanton(grid, {e})});
  }
  const int N = params.N();
  for (int s = 0; s < config.n_starts; ++s) {
    const std::size_t index = starts.size();
    std::mt19937_64 rng(config.seed + index);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double c[3][4];
    for (auto& row : c)
      for (double& v : row) v = 0.4 * unit(rng) / 3.0;
    const double e = lo * std::pow(hi / lo, 0.5 * (1.0 + unit(rng)));
    const double peak = 1.75 + 1.25 * unit(rng);
    Field f(grid);
    std::vector<double> bump;
    bubble_field(*grid, e, 0.0, bump);
    const double bscale = peak * std::pow(e, 0.5 * (N - 2));
    for (int i = 0; i < grid->n_r(); ++i) {
      const double x = grid->r()[i] / R;
      for (int j = 0; j < grid->n_theta(); ++j) {
        double v = 1.0;
        for (int m = 0; m < 3; ++m)
          for (int k = 0; k < 4; ++k) v += c[m][k] * std::pow(x, m + 1) * std::cos(k * grid->theta()[j]);
        const std::size_t n = grid->index(i, j);
        f.values[n] = std::max(v, 0.05) + bscale * bump[n];
      }
    }
    char name[48];
    std::snprintf(name, sizeof name, "random(%zu)", index);
    starts.push_back({name, std::move(f)});
  }
  return starts;
}

// ---------------------------------------------------------------------------
// Descent

SolveResult minimize_from(const ProblemParams& params, const SolveConfig& config, const Field& start,
                          const H1Operator& P) {
  config.validate();
  require_nonzero(start);
  const std::size_t n = start.values.size();
  const double pstar = params.exponents.star();
  Objective obj(params, start.grid);

  std::vector<double> u(n), g(n), d(n), trial(n), gt(n), pu(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = std::max(start.values[k], 0.0);
  Eval e = obj.eval(u);
  if (!std::isfinite(e.I)) throw DegenerateInputError("minimize: start field vanishes after projection");
  {
    const double lam = std::pow(e.m.star, -1.0 / pstar);
    for (double& v : u) v *= lam;
    e = obj.eval(u);
  }
  obj.gradient(u, e, g);

  SolveResult res;
  const double I0 = e.I;
  std::vector<double> best = u;
  double best_I = e.I;
  std::deque<double> hist{e.I};
  double step = e.triple.a_bar / (2.0 * e.I);
  const double step0 = step;
  double gnorm = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < config.max_iters; ++it) {
    P.solve(g, d);
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = -d[k];
      if (u[k] <= 0.0 && d[k] < 0.0) d[k] = 0.0;
    }
    gnorm = std::sqrt(std::max(-dot(g, d), 0.0) * e.triple.a_bar) / e.I;
    if (gnorm <= config.grad_tol) {
      converged = true;
      break;
    }
    const double ref = *std::max_element(hist.begin(), hist.end());
    Eval et{};
    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < config.max_backtracks; ++bt, s *= config.backtrack) {
      double slope = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        trial[k] = std::max(u[k] + s * d[k], 0.0);
        slope += g[k] * (trial[k] - u[k]);
      }
      et = obj.eval(trial);
      if (std::isfinite(et.I) && et.I <= ref + config.armijo_c * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    obj.gradient(trial, et, gt);
    const double lam = std::pow(et.m.star, -1.0 / pstar);
    double sPs_num = 0.0, yTs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      trial[k] *= lam;
      gt[k] /= lam;
      d[k] = trial[k] - u[k];
      yTs += d[k] * (gt[k] - g[k]);
    }
    P.apply(d, pu);
    sPs_num = dot(d, pu);
    et.triple.a_bar *= lam * lam;
    et.triple.b *= std::pow(lam, params.exponents.tilde());
    et.triple.c = 1.0;
    u.swap(trial);
    g.swap(gt);
    e = et;
    step = yTs > 0.0 ? std::clamp(sPs_num / yTs, 1e-8 * step0, 1e8 * step0) : std::min(4.0 * s, 1e8 * step0);
    hist.push_back(e.I);
    if (static_cast<int>(hist.size()) > config.nonmonotone_memory) hist.pop_front();
    if (e.I < best_I) {
      best_I = e.I;
      best = u;
    }
  }
  if (converged && e.I <= best_I * (1.0 + 1e-12)) {
    best = u;
    best_I = e.I;
  }
  res.minimizer = Field(start.grid);
  res.minimizer.values = std::move(best);
  const Eval fin = obj.eval(res.minimizer.values);
  res.S_alpha_est = fin.I;
  res.triple = fin.triple;
  res.iterations = it;
  res.grad_norm = grad_norm_with(params, res.minimizer, P);
  res.converged = res.grad_norm <= config.grad_tol;
  res.el_residual = el_residual_with(params, res.minimizer, P);
  res.starts.push_back({"single", I0, res.S_alpha_est, it, res.converged, res.grad_norm});
  return res;
}

namespace {

SolveResult minimize_with(const ProblemParams& params, const SolveConfig& config, std::shared_ptr<const AxiGrid> grid,
                          const H1Operator& P, std::span<const Field> warm) {
  std::vector<StartField> starts;
  for (const Field& w : warm) starts.push_back({"warm", w});
  for (auto& s : default_starts(params, config, grid)) starts.push_back(std::move(s));
  std::vector<SolveResult> out(starts.size());
  std::vector<std::string> errors(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < starts.size();) {
      try {
        out[k] = minimize_from(params, config, starts[k].field, P);
      } catch (const std::exception& ex) {
        errors[k] = ex.what();
      }
    }
  };
  const int nthreads = std::min<int>(config.threads, static_cast<int>(starts.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int best = -1;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (!errors[k].empty()) continue;
    if (best < 0 || out[k].S_alpha_est < out[best].S_alpha_est) best = static_cast<int>(k);
  }
  if (best < 0) throw DegenerateInputError("minimize: every start failed: " + errors.front());
  std::vector<StartSummary> summary;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (!errors[k].empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      summary.push_back({starts[k].kind + " [failed: " + errors[k] + "]", nan, nan, 0, false, nan});
    } else {
      summary.push_back(out[k].starts.front());
      summary.back().kind = starts[k].kind;
    }
  }
  SolveResult res = std::move(out[best]);
  res.best_start = best;
  res.starts = std::move(summary);
  res.diagnostics = blowup_diagnostics(res.minimizer, params);
  return res;
}

}  // namespace

SolveResult minimize(const ProblemParams& params, const SolveConfig& config, std::shared_ptr<const AxiGrid> grid,
                     std::span<const Field> warm_starts) {
  config.validate();
  const H1Operator P(grid, params.a);
  return minimize_with(params, config, grid, P, warm_starts);
}

// ---------------------------------------------------------------------------
// Sweeps

SweepResult sweep_alpha(const ProblemParams& base, std::span<const double> alphas, const SolveConfig& config,
                        std::shared_ptr<const AxiGrid> grid) {
  config.validate();
  if (alphas.empty()) throw ValidationError("sweep_alpha: empty alpha list");
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!(alphas[k] >= 0.0) || !std::isfinite(alphas[k])) throw ValidationError("sweep_alpha: alpha must be >= 0");
    if (k > 0 && !(alphas[k] > alphas[k - 1])) throw ValidationError("sweep_alpha: alphas must be strictly ascending");
  }
  const H1Operator P(grid, base.a);
  SweepResult out;
  out.alphas.assign(alphas.begin(), alphas.end());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const ProblemParams p(base.N(), base.a, alphas[k], base.radius);
    std::vector<Field> warm;
    if (k > 0) warm.push_back(out.results.back().minimizer);
    out.results.push_back(minimize_with(p, config, grid, P, warm));
  }
  // Backward pass: a minimizer at alpha_{k+1} is an admissible start at alpha_k
  // with no larger energy.
  for (std::size_t k = alphas.size() - 1; k-- > 0;) {
    if (out.results[k].S_alpha_est <= out.results[k + 1].S_alpha_est) continue;
    const ProblemParams p(base.N(), base.a, alphas[k], base.radius);
    SolveResult r = minimize_from(p, config, out.results[k + 1].minimizer, P);
    if (r.S_alpha_est < out.results[k].S_alpha_est) {
      r.starts = out.results[k].starts;
      r.starts.push_back({"backward", evaluate_I(out.results[k + 1].minimizer, p), r.S_alpha_est, r.iterations,
                          r.converged, r.grad_norm});
      r.best_start = static_cast<int>(r.starts.size()) - 1;
      r.diagnostics = blowup_diagnostics(r.minimizer, p);
      out.results[k] = std::move(r);
    }
  }
  for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
    if (out.results[k].S_alpha_est > out.results[k + 1].S_alpha_est + 1e-6) out.violations.push_back(static_cast<int>(k));
  }
  return out;
}

Alpha0Result estimate_alpha0(const ProblemParams& base, const SolveConfig& config, std::shared_ptr<const AxiGrid> grid,
                             double alpha_lo, double alpha_hi) {
  config.validate();
  if (!(alpha_lo >= 0.0) || !(alpha_hi > alpha_lo) || !std::isfinite(alpha_hi)) {
    throw BracketError("estimate_alpha0: need 0 <= alpha_lo < alpha_hi");
  }
  const int N = base.N();
  const H1Operator P(grid, base.a);
  Alpha0Result out{};
  out.threshold = half_space_threshold(N);
  out.target = (1.0 - config.tau) * out.threshold;
  out.A_over_R = curvature_A(N) / base.radius;
  out.A_scaled_over_R = curvature_A(N) * instanton_scale_factor(N) / base.radius;
  out.amax = amax_constant_bound(N, base.a, ball_volume(N, base.radius));
  auto solve = [&](double alpha, std::span<const Field> warm) {
    const ProblemParams p(N, base.a, alpha, base.radius);
    SolveResult r = minimize_with(p, config, grid, P, warm);
    out.evaluations.emplace_back(alpha, r.S_alpha_est);
    return r;
  };
  SolveResult lo = solve(alpha_lo, {});
  SolveResult hi = solve(alpha_hi, {});
  if (!(lo.S_alpha_est < out.target) || !(hi.S_alpha_est >= out.target)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "estimate_alpha0: no threshold crossing in [%.6g, %.6g] (S = %.6g, %.6g; target %.6g)",
                  alpha_lo, alpha_hi, lo.S_alpha_est, hi.S_alpha_est, out.target);
    throw BracketError(buf);
  }
  double a = alpha_lo, b = alpha_hi;
  while (b - a > config.alpha_rel_tol * 0.5 * (a + b)) {
    const double mid = 0.5 * (a + b);
    const Field warm[2] = {lo.minimizer, hi.minimizer};
    SolveResult r = solve(mid, warm);
    if (r.S_alpha_est < out.target) {
      a = mid;
      lo = std::move(r);
    } else {
      b = mid;
      hi = std::move(r);
    }
  }
  out.alpha_lo = a;
  out.alpha_hi = b;
  out.alpha_hat = 0.5 * (a + b);
  out.S_lo = lo.S_alpha_est;
  out.S_hi = hi.S_alpha_est;
  out.result_lo = std::move(lo);
  out.result_hi = std::move(hi);
  return out;
}

// ---------------------------------------------------------------------------
// Blow-up diagnostics

InstantonFit fit_instanton(const Field& field, double a, double init_eps) {
  require_nonzero(field);
  const AxiGrid& g = *field.grid;
  InstantonFit fit;
  const auto it = std::max_element(field.values.begin(), field.values.end());
  const std::size_t n = static_cast<std::size_t>(it - field.values.begin());
  const int i = static_cast<int>(n) / g.n_theta(), j = static_cast<int>(n) % g.n_theta();
  const double lo_v = *std::min_element(field.values.begin(), field.values.end());
  if (*it - lo_v <= 1e-6 * std::abs(*it)) {
    fit.note = "flat field; fit skipped";
    return fit;
  }
  // y is the boundary pole nearest the maximum; the maximum must sit within its
  // own concentration length delta_M of y.
  const int N = g.N();
  const double R = g.R(), rp = g.r()[i], th = g.theta()[j];
  fit.pole_theta = th <= 0.5 * std::numbers::pi ? 0.0 : std::numbers::pi;
  const double sh = std::sin(0.5 * (th - fit.pole_theta));
  const double dist = std::sqrt((R - rp) * (R - rp) + 4.0 * rp * R * sh * sh);
  const double delta_M = std::pow(*it, -2.0 / (N - 2));
  if (dist > delta_M) {
    fit.note = R - rp > delta_M ? "interior maximum; fit skipped" : "boundary maximum off the symmetry axis; fit skipped";
    return fit;
  }
  if (!(init_eps > 0.0)) init_eps = delta_M;

  const std::vector<double>& v = field.values;
  std::vector<double> pv(v.size()), U, pU(v.size()), m(v.size());
  auto applyP = [&](const std::vector<double>& x, std::vector<double>& y) {
    g.apply_stiffness(x, y);
    g.apply_mass(x, m);
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * m[k];
  };
  applyP(v, pv);
  const double vv = dot(v, pv);
  double best_C = 0.0;
  auto residual = [&](double log_eps) {
    bubble_field(g, std::exp(log_eps), fit.pole_theta, U);
    applyP(U, pU);
    const double vu = dot(v, pU), uu = dot(U, pU);
    best_C = vu / uu;
    return std::max(vv - vu * best_C, 0.0);
  };
  const double e_min = min_resolvable_eps(g);
  double lo = std::log(std::max(e_min, init_eps / 8.0));
  double hi = std::log(std::max(std::min(2.0 * g.R(), init_eps * 8.0), 8.0 * e_min));
  std::pair<double, double> r;
  for (int expand = 0; expand < 6; ++expand) {
    r = boost::math::tools::brent_find_minima(residual, lo, hi, 40);
    bool moved = false;
    if (r.first - lo < 1e-3 && lo > std::log(e_min) + 1e-12) {
      lo = std::max(std::log(e_min), lo - std::log(8.0));
      moved = true;
    }
    if (hi - r.first < 1e-3 && hi < std::log(2.0 * g.R()) - 1e-12) {
      hi = std::min(std::log(2.0 * g.R()), hi + std::log(8.0));
      moved = true;
    }
    if (!moved) break;
  }
  residual(r.first);
  fit.ok = true;
  fit.params = {std::exp(r.first), fit.pole_theta, best_C};
  fit.w_norm = std::sqrt(r.second);
  fit.w_norm_rel = fit.w_norm / std::sqrt(vv);
  return fit;
}

BlowupDiagnostics blowup_diagnostics(const Field& field, const ProblemParams& params) {
  require_nonzero(field);
  Objective obj(params, field.grid);
  const Eval e = obj.eval(field.values);
  const double t = project_t(e.triple);
  const AxiGrid& g = *field.grid;
  Field w(field.grid);
  for (std::size_t k = 0; k < w.values.size(); ++k) w.values[k] = t * field.values[k];
  BlowupDiagnostics d;
  const auto it = std::max_element(w.values.begin(), w.values.end());
  const std::size_t n = static_cast<std::size_t>(it - w.values.begin());
  d.M = *it;
  d.delta_M = std::pow(d.M, -2.0 / (params.N() - 2));
  d.P_i = static_cast<int>(n) / g.n_theta();
  d.P_j = static_cast<int>(n) % g.n_theta();
  d.P_r = g.r()[d.P_i];
  d.P_theta = g.theta()[d.P_j];
  d.boundary_flag = d.P_i == g.n_r() - 1;
  d.u_norm = t * std::sqrt(e.triple.a_bar);
  d.fit = fit_instanton(w, params.a, d.delta_M);
  return d;
}

}  // namespace nehari_lab

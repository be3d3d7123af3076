#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nehari_lab/constants.hpp"
#include "nehari_lab/domain_grid.hpp"
#include "nehari_lab/instanton.hpp"
#include "nehari_lab/nehari.hpp"

namespace nehari_lab {

struct SolveConfig {
  int max_iters = 1500;
  /// Stationarity tolerance on the scale-free gradient norm, see SolveResult::grad_norm.
  double grad_tol = 1e-6;
  /// Random starts on top of the constant and instanton starts.
  int n_starts = 2;
  std::uint64_t seed = 1;
  // Nonmonotone Armijo line search on a Barzilai-Borwein step.
  double armijo_c = 1e-4;
  int nonmonotone_memory = 10;
  double backtrack = 0.5;
  int max_backtracks = 40;
  /// Threshold slack for alpha0 detection.
  double tau = 0.01;
  /// Bisection stops once hi - lo <= alpha_rel_tol * mid.
  double alpha_rel_tol = 1e-3;
  int threads = 1;

  void validate() const;
};

/// The H^1 Gram operator P = K + a M and its exact inverse by fast diagonalization
/// in theta (generalized eigenbasis) and tridiagonal solves in r.
class H1Operator {
 public:
  H1Operator(std::shared_ptr<const AxiGrid> grid, double a);

  void apply(std::span<const double> x, std::span<double> y) const;
  void solve(std::span<const double> b, std::span<double> x) const;
  double inner(std::span<const double> x, std::span<const double> y) const;
  double a() const { return a_; }
  const AxiGrid& grid() const { return *grid_; }

 private:
  std::shared_ptr<const AxiGrid> grid_;
  double a_;
  std::vector<double> V_;       // n_theta x n_theta, column k = k-th eigenvector, row-major
  std::vector<double> lambda_;  // eigenvalues
};

struct InstantonFit {
  bool ok = false;
  InstantonParams params{0.0};
  double pole_theta = 0.0;
  /// H^1 norm of field - C U_{eps,y}, absolute and relative to the field's H^1 norm.
  double w_norm = 0.0;
  double w_norm_rel = 0.0;
  std::string note;
};

struct BlowupDiagnostics {
  double M = 0.0;
  double delta_M = 0.0;
  int P_i = 0;
  int P_j = 0;
  double P_r = 0.0;
  double P_theta = 0.0;
  bool boundary_flag = false;
  /// H^1 norm of t(u) u.
  double u_norm = 0.0;
  InstantonFit fit;
};

struct StartSummary {
  std::string kind;
  double initial_I;
  double final_I;
  int iterations;
  bool converged;
  double grad_norm;
};

struct SolveResult {
  double S_alpha_est = 0.0;
  Field minimizer;
  NormTriple triple{};
  int iterations = 0;
  bool converged = false;
  /// sqrt(g P^{-1} g) |u|_P / I at the returned field.
  double grad_norm = 0.0;
  /// Weak Euler-Lagrange residual of t(u) u in the P-dual norm, relative to |t u|_P.
  double el_residual = 0.0;
  int best_start = 0;
  std::vector<StartSummary> starts;
  BlowupDiagnostics diagnostics;
};

double evaluate_I(const Field& field, const ProblemParams& params);
Field gradient_I(const Field& field, const ProblemParams& params);
/// Scale-free stationarity measure of a field.
double gradient_norm(const Field& field, const ProblemParams& params);
double el_residual(const Field& field, const ProblemParams& params);

/// Starting fields used by minimize, in start-index order.
struct StartField {
  std::string kind;
  Field field;
};
std::vector<StartField> default_starts(const ProblemParams& params, const SolveConfig& config,
                                       std::shared_ptr<const AxiGrid> grid);

SolveResult minimize(const ProblemParams& params, const SolveConfig& config, std::shared_ptr<const AxiGrid> grid,
                     std::span<const Field> warm_starts = {});

/// Descent from one start only.
SolveResult minimize_from(const ProblemParams& params, const SolveConfig& config, const Field& start,
                          const H1Operator& P);

struct SweepResult {
  std::vector<double> alphas;
  std::vector<SolveResult> results;
  /// Indices k with S(alpha_k) > S(alpha_{k+1}) + 1e-6 after the backward pass.
  std::vector<int> violations;
};

SweepResult sweep_alpha(const ProblemParams& base, std::span<const double> alphas, const SolveConfig& config,
                        std::shared_ptr<const AxiGrid> grid);

struct Alpha0Result {
  double alpha_hat;
  double alpha_lo;
  double alpha_hi;
  double S_lo;
  double S_hi;
  double threshold;
  double target;
  double A_over_R;
  double A_scaled_over_R;
  std::optional<double> amax;
  std::vector<std::pair<double, double>> evaluations;
  SolveResult result_lo;
  SolveResult result_hi;
};

Alpha0Result estimate_alpha0(const ProblemParams& base, const SolveConfig& config, std::shared_ptr<const AxiGrid> grid,
                             double alpha_lo, double alpha_hi);

/// Least-squares fit of C U_{eps,y} in the H^1 norm (P with mass weight a), y the boundary pole
/// nearest the field maximum. init_eps <= 0 means eps = max^{-2/(N-2)}.
InstantonFit fit_instanton(const Field& field, double a = 1.0, double init_eps = 0.0);

BlowupDiagnostics blowup_diagnostics(const Field& field, const ProblemParams& params);

}  // namespace nehari_lab

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nehari_lab/constants.hpp"
#include "nehari_lab/instanton.hpp"
#include "nehari_lab/nehari.hpp"

namespace nehari_lab {

struct GridSpec {
  int N = 5;
  double R = 1.0;
  int n_r = 64;
  int n_theta = 64;
  /// sinh clustering of r-nodes toward r = R and theta-nodes toward theta = 0; 0 is uniform.
  double stretch_r = 0.0;
  double stretch_theta = 0.0;
  /// Gauss points per cell and direction.
  int gauss_order = 3;
};

/// Symmetric tridiagonal matrix.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;
};

/// One coordinate direction of the tensor grid with its 1-D element matrices.
struct GridAxis {
  std::vector<double> nodes;
  int ng = 3;
  /// Gauss point coordinates and measure-weighted quadrature weights, cell-major.
  std::vector<double> gp;
  std::vector<double> gp_weight;
  /// Shape function values at the ng reference points (left / right node).
  std::vector<double> phi_left;
  std::vector<double> phi_right;
  Tridiag stiff;
  /// Per-cell stiffness weight: stiff = D^T diag(cell_stiff) D with D the difference operator.
  std::vector<double> cell_stiff;
  Tridiag mass;
  /// r only: stiffness-free mass with measure r^{N-3}, pairs with the theta stiffness.
  Tridiag mass_inv2;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_gp() const { return static_cast<int>(gp.size()); }
};

/// Axisymmetric (r, theta) grid on the ball of radius R in R^N with conforming
/// bilinear elements. Nodes are indexed i * n_theta + j.
class AxiGrid {
 public:
  explicit AxiGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int N() const { return spec_.N; }
  double R() const { return spec_.R; }
  int n_r() const { return spec_.n_r; }
  int n_theta() const { return spec_.n_theta; }
  std::size_t size() const { return static_cast<std::size_t>(spec_.n_r) * spec_.n_theta; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * spec_.n_theta + j; }

  const std::vector<double>& r() const { return r_.nodes; }
  const std::vector<double>& theta() const { return th_.nodes; }
  const GridAxis& axis_r() const { return r_; }
  const GridAxis& axis_theta() const { return th_; }

  /// Nodal quadrature weights: integrals of the nodal basis functions.
  const std::vector<double>& weights() const { return weights_; }
  double weight_sum() const;
  double volume() const { return ball_volume(spec_.N, spec_.R); }
  /// Mesh size at the north pole (r = R, theta = 0).
  double pole_spacing() const;

  /// Y = K U with K the gradient-energy matrix.
  void apply_stiffness(std::span<const double> u, std::span<double> y) const;
  /// Y = M U with M the consistent mass matrix.
  void apply_mass(std::span<const double> u, std::span<double> y) const;

 private:
  GridSpec spec_;
  GridAxis r_;
  GridAxis th_;
  std::vector<double> weights_;
};

std::shared_ptr<const AxiGrid> build_grid(const GridSpec& spec);

struct Field {
  std::shared_ptr<const AxiGrid> grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(std::shared_ptr<const AxiGrid> g, double fill = 0.0)
      : grid(std::move(g)), values(grid->size(), fill) {}
};

/// The four integrals the Nehari reduction needs.
struct Moments {
  double grad_sq;
  double l2_sq;
  double tilde;
  double star;
};

/// Scratch buffers for evaluating Moments and their gradients on a grid.
/// Not shareable between threads.
class MomentWorkspace {
 public:
  explicit MomentWorkspace(std::shared_ptr<const AxiGrid> grid);

  Moments compute(std::span<const double> u);
  /// out = c_grad dGrad + c_l2 dL2 + c_tilde dTilde + c_star dStar at the last computed field.
  void gradient(std::span<const double> u, double c_grad, double c_l2, double c_tilde, double c_star,
                std::span<double> out);
  const AxiGrid& grid() const { return *grid_; }

 private:
  std::shared_ptr<const AxiGrid> grid_;
  double p_tilde_;
  double p_star_;
  std::vector<double> v_;
  std::vector<double> g_;
  std::vector<double> gt_;
  std::vector<double> gs_;
  std::vector<double> d_;
  std::vector<double> e_;
  std::vector<double> ku_;
};

struct FieldNorms {
  NormTriple triple;
  double l2_sq;
  double tilde_pow;
  double star_pow;
  double grad_sq;
};

FieldNorms norms(const Field& field, const ProblemParams& params);
FieldNorms norms(const Field& field, const ProblemParams& params, MomentWorkspace& ws);

/// Nodal values of C U_{eps,y}, y the north pole.
Field interpolate_instanton(std::shared_ptr<const AxiGrid> grid, const InstantonParams& inst);
double min_resolvable_eps(const AxiGrid& grid);

void write_field_snapshot(const Field& field, const std::string& csv_path, const std::string& json_path);

}  // namespace nehari_lab

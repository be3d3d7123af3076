#include <cmath>

#include "nehari_lab/kernels.hpp"

namespace nehari_lab::kernels::scalar {

PowerSums power_sums(const double* g, std::size_t rows, std::size_t cols, const double* w_row, const double* w_col,
                     double p_tilde, double p_star, double* g_tilde, double* g_star) {
  PowerSums total{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < rows; ++i) {
    const double* gr = g + i * cols;
    double* tr = g_tilde + i * cols;
    double* sr = g_star + i * cols;
    double s2 = 0.0, st = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = std::abs(gr[j]);
      const double t = v > 0.0 ? std::pow(v, p_tilde) : 0.0;
      const double s = v > 0.0 ? std::pow(v, p_star) : 0.0;
      tr[j] = t;
      sr[j] = s;
      s2 += w_col[j] * v * v;
      st += w_col[j] * t;
      ss += w_col[j] * s;
    }
    total.s2 += w_row[i] * s2;
    total.s_tilde += w_row[i] * st;
    total.s_star += w_row[i] * ss;
  }
  return total;
}

void moment_derivative(const double* g, const double* g_tilde, const double* g_star, std::size_t rows,
                       std::size_t cols, const double* w_row, const double* w_col, double c_lin, double c_tilde,
                       double c_star, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t o = i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = g[o + j];
      out[o + j] = v != 0.0 ? w_row[i] * w_col[j] * (c_lin * v + (c_tilde * g_tilde[o + j] + c_star * g_star[o + j]) / v)
                            : 0.0;
    }
  }
}

}  // namespace nehari_lab::kernels::scalar

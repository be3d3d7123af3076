#pragma once

#include <cstddef>

namespace nehari_lab::kernels {

enum class Backend { scalar, avx2 };

/// Separably weighted sums over a rows x cols block:
/// sum_i w_row[i] sum_j w_col[j] {g^2, |g|^{p_tilde}, |g|^{p_star}}.
struct PowerSums {
  double s2;
  double s_tilde;
  double s_star;
};

/// Also stores |g|^{p_tilde} and |g|^{p_star} elementwise (0 where g == 0).
using PowerSumsFn = PowerSums (*)(const double* g, std::size_t rows, std::size_t cols, const double* w_row,
                                  const double* w_col, double p_tilde, double p_star, double* g_tilde,
                                  double* g_star);

/// out = w_row[i] w_col[j] (c_lin g + c_tilde g_tilde/g + c_star g_star/g), 0 where g == 0.
using MomentDerivativeFn = void (*)(const double* g, const double* g_tilde, const double* g_star,
                                    std::size_t rows, std::size_t cols, const double* w_row, const double* w_col,
                                    double c_lin, double c_tilde, double c_star, double* out);

struct KernelTable {
  Backend backend;
  PowerSumsFn power_sums;
  MomentDerivativeFn moment_derivative;
};

bool supported(Backend b);
Backend best_available();
const char* name(Backend b);
const KernelTable& table(Backend b);

/// Table in use. Chosen on first call from NEHARI_LAB_KERNELS (scalar|avx2|auto),
/// defaulting to the best supported backend.
const KernelTable& active();
void select(Backend b);

namespace scalar {
PowerSums power_sums(const double* g, std::size_t rows, std::size_t cols, const double* w_row, const double* w_col,
                     double p_tilde, double p_star, double* g_tilde, double* g_star);
void moment_derivative(const double* g, const double* g_tilde, const double* g_star, std::size_t rows,
                       std::size_t cols, const double* w_row, const double* w_col, double c_lin, double c_tilde,
                       double c_star, double* out);
}  // namespace scalar

#if defined(NEHARI_LAB_HAVE_AVX2)
namespace avx2 {
PowerSums power_sums(const double* g, std::size_t rows, std::size_t cols, const double* w_row, const double* w_col,
                     double p_tilde, double p_star, double* g_tilde, double* g_star);
void moment_derivative(const double* g, const double* g_tilde, const double* g_star, std::size_t rows,
                       std::size_t cols, const double* w_row, const double* w_col, double c_lin, double c_tilde,
                       double c_star, double* out);
/// Vectorized log/exp used by power_sums, exposed for accuracy tests.
void log4(const double* x, double* out, std::size_t n);
void exp4(const double* x, double* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace nehari_lab::kernels

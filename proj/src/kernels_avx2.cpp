#include <immintrin.h>

#include <cfloat>
#include <cmath>

#include "nehari_lab/kernels.hpp"

namespace nehari_lab::kernels::avx2 {

namespace {

// Cephes-style log for positive normal doubles.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256d magic = _mm256_set1_pd(0x1p52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 52), _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                                                  _mm256_set1_epi64x(0x3FE0000000000000LL)));
  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d xr = _mm256_sub_pd(_mm256_add_pd(m, _mm256_and_pd(small, m)), one);

  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, xr, _mm256_set1_pd(7.70838733755885391666E0));
  __m256d q = _mm256_add_pd(xr, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, xr, _mm256_set1_pd(2.31251620126765340583E1));

  const __m256d z = _mm256_mul_pd(xr, xr);
  __m256d y = _mm256_mul_pd(xr, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(xr, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

// Cephes-style exp; inputs below -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d under = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));
  const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, _mm256_set1_pd(1.4426950408889634073599), _mm256_set1_pd(0.5)));
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), x);
  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));
  // 2^n through the exponent field.
  const __m256d shifter = _mm256_set1_pd(0x1.8p52);
  __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, shifter)), _mm256_castpd_si256(shifter));
  ni = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(ni));
  return _mm256_andnot_pd(under, r);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

void log4(const double* x, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, log_pd(_mm256_loadu_pd(x + j)));
  for (; j < n; ++j) out[j] = std::log(x[j]);
}

void exp4(const double* x, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, exp_pd(_mm256_loadu_pd(x + j)));
  for (; j < n; ++j) out[j] = std::exp(x[j]);
}

PowerSums power_sums(const double* g, std::size_t rows, std::size_t cols, const double* w_row, const double* w_col,
                     double p_tilde, double p_star, double* g_tilde, double* g_star) {
  PowerSums total{0.0, 0.0, 0.0};
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d tiny = _mm256_set1_pd(DBL_MIN);
  const __m256d pt = _mm256_set1_pd(p_tilde);
  const __m256d ps = _mm256_set1_pd(p_star);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* gr = g + i * cols;
    double* tr = g_tilde + i * cols;
    double* sr = g_star + i * cols;
    __m256d a2 = _mm256_setzero_pd(), at = _mm256_setzero_pd(), as = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d v = _mm256_andnot_pd(sign, _mm256_loadu_pd(gr + j));
      const __m256d live = _mm256_cmp_pd(v, tiny, _CMP_GE_OQ);
      const __m256d L = log_pd(_mm256_max_pd(v, tiny));
      const __m256d t = _mm256_and_pd(live, exp_pd(_mm256_mul_pd(pt, L)));
      const __m256d s = _mm256_and_pd(live, exp_pd(_mm256_mul_pd(ps, L)));
      _mm256_storeu_pd(tr + j, t);
      _mm256_storeu_pd(sr + j, s);
      const __m256d w = _mm256_loadu_pd(w_col + j);
      a2 = _mm256_fmadd_pd(w, _mm256_mul_pd(v, v), a2);
      at = _mm256_fmadd_pd(w, t, at);
      as = _mm256_fmadd_pd(w, s, as);
    }
    double s2 = hsum(a2), st = hsum(at), ss = hsum(as);
    for (; j < cols; ++j) {
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
  const __m256d cl = _mm256_set1_pd(c_lin);
  const __m256d ct = _mm256_set1_pd(c_tilde);
  const __m256d cs = _mm256_set1_pd(c_star);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t o = i * cols;
    const __m256d wr = _mm256_set1_pd(w_row[i]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d v = _mm256_loadu_pd(g + o + j);
      const __m256d live = _mm256_cmp_pd(v, zero, _CMP_NEQ_OQ);
      const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), v, live);
      const __m256d num = _mm256_fmadd_pd(ct, _mm256_loadu_pd(g_tilde + o + j), _mm256_mul_pd(cs, _mm256_loadu_pd(g_star + o + j)));
      const __m256d val = _mm256_fmadd_pd(cl, v, _mm256_div_pd(num, safe));
      const __m256d w = _mm256_mul_pd(wr, _mm256_loadu_pd(w_col + j));
      _mm256_storeu_pd(out + o + j, _mm256_and_pd(live, _mm256_mul_pd(w, val)));
    }
    for (; j < cols; ++j) {
      const double v = g[o + j];
      out[o + j] = v != 0.0 ? w_row[i] * w_col[j] * (c_lin * v + (c_tilde * g_tilde[o + j] + c_star * g_star[o + j]) / v)
                            : 0.0;
    }
  }
}

}  // namespace nehari_lab::kernels::avx2

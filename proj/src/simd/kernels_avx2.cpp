// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.
#include "focklab/simd.hpp"

#include <immintrin.h>

#include <algorithm>
#include <limits>

namespace focklab::simd::avx2 {

namespace {

inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// a * x for two packed complex numbers [re0 im0 re1 im1]
inline __m256d cmul(__m256d a, __m256d x) {
  const __m256d x_re = _mm256_movedup_pd(x);
  const __m256d x_im = _mm256_permute_pd(x, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, x_re, _mm256_mul_pd(a_sw, x_im));
}

}  // namespace

void cmatvec(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  const double* xd = as_doubles(x);
  for (std::size_t j = 0; j < rows; ++j) {
    const double* row = as_doubles(a + j * cols);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= cols; k += 4) {
      acc0 = _mm256_add_pd(acc0, cmul(_mm256_loadu_pd(row + 2 * k), _mm256_loadu_pd(xd + 2 * k)));
      acc1 = _mm256_add_pd(acc1, cmul(_mm256_loadu_pd(row + 2 * k + 4), _mm256_loadu_pd(xd + 2 * k + 4)));
    }
    for (; k + 2 <= cols; k += 2) {
      acc0 = _mm256_add_pd(acc0, cmul(_mm256_loadu_pd(row + 2 * k), _mm256_loadu_pd(xd + 2 * k)));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double re = lanes[0] + lanes[2];
    double im = lanes[1] + lanes[3];
    for (; k < cols; ++k) {
      const cplx r = a[j * cols + k];
      re += r.real() * x[k].real() - r.imag() * x[k].imag();
      im += r.real() * x[k].imag() + r.imag() * x[k].real();
    }
    y[j] = {re, im};
  }
}

void cmatvec_adjoint(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  std::fill(y, y + cols, cplx{});
  double* yd = reinterpret_cast<double*>(y);
  for (std::size_t j = 0; j < rows; ++j) {
    const double* row = as_doubles(a + j * cols);
    const __m256d xv = _mm256_setr_pd(x[j].real(), x[j].imag(), x[j].real(), x[j].imag());
    const __m256d x_sw = _mm256_permute_pd(xv, 0x5);
    std::size_t k = 0;
    for (; k + 2 <= cols; k += 2) {
      const __m256d av = _mm256_loadu_pd(row + 2 * k);
      const __m256d a_re = _mm256_movedup_pd(av);
      const __m256d a_im = _mm256_permute_pd(av, 0xF);
      // [ar*xr + ai*xi, ar*xi - ai*xr]
      const __m256d prod = _mm256_fmsubadd_pd(a_re, xv, _mm256_mul_pd(a_im, x_sw));
      _mm256_storeu_pd(yd + 2 * k, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * k), prod));
    }
    for (; k < cols; ++k) {
      const cplx r = a[j * cols + k];
      const double re = r.real() * x[j].real() + r.imag() * x[j].imag();
      const double im = r.real() * x[j].imag() - r.imag() * x[j].real();
      y[k] += cplx{re, im};
    }
  }
}

double dot(const double* w, const double* v, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(v + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * v[i];
  return s;
}

cplx weighted_sum(const double* w, const cplx* c, std::size_t n) {
  const double* cd = as_doubles(c);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // weights [w0 w0 w1 w1] and [w2 w2 w3 w3]
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d w01 = _mm256_permute4x64_pd(wv, 0x50);
    const __m256d w23 = _mm256_permute4x64_pd(wv, 0xFA);
    acc0 = _mm256_fmadd_pd(w01, _mm256_loadu_pd(cd + 2 * i), acc0);
    acc1 = _mm256_fmadd_pd(w23, _mm256_loadu_pd(cd + 2 * i + 4), acc1);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double re = lanes[0] + lanes[2];
  double im = lanes[1] + lanes[3];
  for (; i < n; ++i) {
    re += w[i] * c[i].real();
    im += w[i] * c[i].imag();
  }
  return {re, im};
}

double max_value(const double* v, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(best);
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(v + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) best = std::max(best, v[i]);
  return best;
}

}  // namespace focklab::simd::avx2

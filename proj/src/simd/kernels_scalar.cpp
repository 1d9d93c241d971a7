#include "focklab/simd.hpp"

#include <algorithm>
#include <limits>

namespace focklab::simd::scalar {

void cmatvec(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < rows; ++j) {
    const cplx* row = a + j * cols;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      re += row[k].real() * x[k].real() - row[k].imag() * x[k].imag();
      im += row[k].real() * x[k].imag() + row[k].imag() * x[k].real();
    }
    y[j] = {re, im};
  }
}

void cmatvec_adjoint(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  std::fill(y, y + cols, cplx{});
  for (std::size_t j = 0; j < rows; ++j) {
    const cplx* row = a + j * cols;
    const double xr = x[j].real();
    const double xi = x[j].imag();
    for (std::size_t k = 0; k < cols; ++k) {
      // conj(a) * x
      const double re = row[k].real() * xr + row[k].imag() * xi;
      const double im = row[k].real() * xi - row[k].imag() * xr;
      y[k] += cplx{re, im};
    }
  }
}

double dot(const double* w, const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * v[i];
  return s;
}

cplx weighted_sum(const double* w, const cplx* c, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += w[i] * c[i].real();
    im += w[i] * c[i].imag();
  }
  return {re, im};
}

double max_value(const double* v, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, v[i]);
  return best;
}

}  // namespace focklab::simd::scalar

#pragma once

// Data-parallel inner loops used by the power iteration and the quadrature
// reductions. Every kernel has a scalar reference implementation; an AVX2+FMA
// variant is selected at runtime when the CPU supports it. Setting the
// environment variable FOCKLAB_SIMD=scalar forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace focklab::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

/// Instruction set used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Overrides the dispatch choice (tests use this to compare variants).
/// Requesting avx2 on a CPU without it falls back to scalar.
void force_isa(Isa isa) noexcept;

bool avx2_available() noexcept;

std::string_view isa_name(Isa isa) noexcept;

// y = A x, A row-major rows x cols.
void cmatvec(std::span<const cplx> a, std::size_t rows, std::size_t cols,
             std::span<const cplx> x, std::span<cplx> y);

// y = A^H x, A row-major rows x cols (x has rows entries, y has cols).
void cmatvec_adjoint(std::span<const cplx> a, std::size_t rows, std::size_t cols,
                     std::span<const cplx> x, std::span<cplx> y);

// sum_i w_i v_i
double dot(std::span<const double> w, std::span<const double> v);

// sum_i w_i c_i with real weights
cplx weighted_sum(std::span<const double> w, std::span<const cplx> c);

// largest element, -inf for an empty span
double max_value(std::span<const double> v);

namespace scalar {
void cmatvec(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
void cmatvec_adjoint(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
double dot(const double* w, const double* v, std::size_t n);
cplx weighted_sum(const double* w, const cplx* c, std::size_t n);
double max_value(const double* v, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define FOCKLAB_HAVE_AVX2_KERNELS 1
namespace avx2 {
void cmatvec(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
void cmatvec_adjoint(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
double dot(const double* w, const double* v, std::size_t n);
cplx weighted_sum(const double* w, const cplx* c, std::size_t n);
double max_value(const double* v, std::size_t n);
}  // namespace avx2
#else
#define FOCKLAB_HAVE_AVX2_KERNELS 0
#endif

}  // namespace focklab::simd

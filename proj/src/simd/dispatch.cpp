#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "focklab/simd.hpp"

namespace focklab::simd {

namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("FOCKLAB_SIMD")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("simd: size mismatch in ") + what);
}

}  // namespace

bool avx2_available() noexcept {
#if FOCKLAB_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void cmatvec(std::span<const cplx> a, std::size_t rows, std::size_t cols,
             std::span<const cplx> x, std::span<cplx> y) {
  require(a.size() == rows * cols && x.size() == cols && y.size() == rows, "cmatvec");
#if FOCKLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::cmatvec(a.data(), rows, cols, x.data(), y.data());
#endif
  scalar::cmatvec(a.data(), rows, cols, x.data(), y.data());
}

void cmatvec_adjoint(std::span<const cplx> a, std::size_t rows, std::size_t cols,
                     std::span<const cplx> x, std::span<cplx> y) {
  require(a.size() == rows * cols && x.size() == rows && y.size() == cols, "cmatvec_adjoint");
#if FOCKLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::cmatvec_adjoint(a.data(), rows, cols, x.data(), y.data());
#endif
  scalar::cmatvec_adjoint(a.data(), rows, cols, x.data(), y.data());
}

double dot(std::span<const double> w, std::span<const double> v) {
  require(w.size() == v.size(), "dot");
#if FOCKLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::dot(w.data(), v.data(), w.size());
#endif
  return scalar::dot(w.data(), v.data(), w.size());
}

cplx weighted_sum(std::span<const double> w, std::span<const cplx> c) {
  require(w.size() == c.size(), "weighted_sum");
#if FOCKLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::weighted_sum(w.data(), c.data(), w.size());
#endif
  return scalar::weighted_sum(w.data(), c.data(), w.size());
}

double max_value(std::span<const double> v) {
#if FOCKLAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::max_value(v.data(), v.size());
#endif
  return scalar::max_value(v.data(), v.size());
}

}  // namespace focklab::simd

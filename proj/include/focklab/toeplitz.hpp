#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "focklab/quadrature.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

/// Matrix of P_N T_u T_conj(v) P_N in the orthonormal basis z^k / sqrt(h_k).
struct CompressionMatrix {
  int n = 0;
  std::vector<cplx> entries;  // row-major n x n
  bool overflow = false;

  cplx at(int j, int k) const { return entries[static_cast<std::size_t>(j) * n + k]; }
  /// Leading n x n block, itself the compression at dimension n.
  CompressionMatrix leading(int n_sub) const;
};

/// A_jk = sum_{l <= min(j,k)} u_{j-l} conj(v_{k-l}) sqrt(h_j h_k) / h_l, summed in long double.
/// Throws when N - 1 exceeds the truncation of a series with a nonzero declared tail bound.
CompressionMatrix compression_matrix(const TaylorFunction& u, const TaylorFunction& v, const FockContext& ctx, int N);

struct NormEstimate {
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on A A^H.
NormEstimate operator_norm_lower(const CompressionMatrix& A, double tol = 1e-10, int max_iter = 10000,
                                 std::uint64_t seed = 42);

enum class CurveVerdict { bounded_consistent, unbounded_consistent, inconclusive };
std::string_view curve_verdict_name(CurveVerdict v) noexcept;

struct NormCurve {
  std::vector<int> Ns;
  std::vector<double> sigmas;
  std::vector<int> iterations;
  std::vector<bool> converged;
  double growth_ratio = 1.0;  // sigma(N_max) / sigma(N_max / 4)
  CurveVerdict verdict = CurveVerdict::inconclusive;
};

/// sigma(N) for u = e^g, v = e^{-g}. N_max / 4 is added to Ns when missing.
NormCurve norm_growth_curve(const PolynomialSymbol& g, const FockContext& ctx, std::vector<int> Ns,
                            double plateau = 1.05, double blowup = 5.0, std::uint64_t seed = 42);

/// ln H_g(z, w) = ln|K(z,w)| - (|z|^{2m} + |w|^{2m}) / 2 + Re g(z) - Re g(w).
double log_schur_H(const PolynomialSymbol& g, const FockContext& ctx, cplx z, cplx w);
double schur_H(const PolynomialSymbol& g, const FockContext& ctx, cplx z, cplx w);

/// ln of the row integral of H_g(z, .) over the plane.
LogIntegral log_schur_row(const PolynomialSymbol& g, const FockContext& ctx, cplx z, const QuadratureSpec& spec);

struct SchurFit {
  std::vector<double> as;
  std::vector<double> sups;
  double C1 = 0.0;
  double C2 = 0.0;
};

struct SchurReport {
  std::vector<double> grid;      // radii
  std::vector<double> H_values;  // max over phases of H_g + H_{-g} at each radius
  double sup_value = 0.0;
  double assembled_bound = 0.0;  // product bound from the monomial pieces
  double max_est_rel_err = 0.0;
  bool saturated = false;
  double fitted_C1 = 0.0;
  double fitted_C2 = 0.0;
  SchurFit fit;
};

/// sup over z = x e^{i psi} (x in grid, psi on n_phase points) of the Schur row sums.
SchurReport schur_bound(const PolynomialSymbol& g, const FockContext& ctx, const std::vector<double>& grid,
                        const QuadratureSpec& spec, int n_phase = 8, bool fit_constants = true);

/// sup values for a z^d over the a-sweep and the fit sup = C1 exp(C2 a^2).
SchurFit fit_schur_constants(const FockContext& ctx, int d, const std::vector<double>& as,
                             const std::vector<double>& grid, const QuadratureSpec& spec, int n_phase = 8);

/// F(z, w) = conj(c) e^{g(z) - conj(g(w))} K(z,w) / sqrt(K(z,z) K(w,w)) as log modulus and phase.
KernelValue sarason_F(const PolynomialSymbol& g, cplx c, const FockContext& ctx, cplx z, cplx w);

/// Points z(x), w(x) at equal modulus x, separated in angle by a fraction of the kernel window.
std::pair<cplx, cplx> sarason_test_points(const PolynomialSymbol& g, const FockContext& ctx, double x,
                                          double window_c = 1.0);

struct FGridReport {
  std::vector<double> radii;           // nested radius caps
  std::vector<double> max_log_abs_F;   // max ln|F| over |z|, |w| <= cap
};

FGridReport sarason_F_grid(const PolynomialSymbol& g, cplx c, const FockContext& ctx, const std::vector<double>& caps,
                           int n_radial = 8, int n_angular = 12);

/// e^{|a|^2 / 2}
double weyl_norm_m1(cplx a);

}  // namespace focklab

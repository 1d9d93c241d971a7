#include "focklab/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "focklab/parallel.hpp"
#include "focklab/simd.hpp"

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(const std::vector<cplx>& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace

CompressionMatrix CompressionMatrix::leading(int n_sub) const {
  if (n_sub < 0 || n_sub > n) throw std::out_of_range("CompressionMatrix::leading: bad size");
  CompressionMatrix out;
  out.n = n_sub;
  out.overflow = overflow;
  out.entries.resize(static_cast<std::size_t>(n_sub) * n_sub);
  for (int j = 0; j < n_sub; ++j) {
    for (int k = 0; k < n_sub; ++k) out.entries[static_cast<std::size_t>(j) * n_sub + k] = at(j, k);
  }
  return out;
}

CompressionMatrix compression_matrix(const TaylorFunction& u, const TaylorFunction& v, const FockContext& ctx, int N) {
  if (N < 1) throw std::invalid_argument("compression_matrix: N must be >= 1");
  // a series with zero tail bound is an exact polynomial and is padded with zeros
  const auto short_of = [N](const TaylorFunction& f) { return f.N() < N - 1 && f.declared_tail_bound > 0.0; };
  if (short_of(u) || short_of(v)) throw std::invalid_argument("compression_matrix: N exceeds the truncation of u or v");
  const auto coeff = [](const TaylorFunction& f, int i) { return i <= f.N() ? f.coeffs[i] : cplx{}; };
  CompressionMatrix A;
  A.n = N;
  A.entries.resize(static_cast<std::size_t>(N) * N);
  std::vector<long double> lh(N);
  for (int k = 0; k < N; ++k) lh[k] = ctx.log_h(k);
  std::vector<char> bad(N, 0);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t js) {
    const int j = static_cast<int>(js);
    for (int k = 0; k < N; ++k) {
      long double re = 0.0L, im = 0.0L;
      for (int l = 0; l <= std::min(j, k); ++l) {
        const cplx uv = coeff(u, j - l) * std::conj(coeff(v, k - l));
        if (uv == cplx{}) continue;
        const long double f = std::exp(0.5L * lh[j] + 0.5L * lh[k] - lh[l]);
        re += f * static_cast<long double>(uv.real());
        im += f * static_cast<long double>(uv.imag());
      }
      const cplx e{static_cast<double>(re), static_cast<double>(im)};
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) bad[j] = 1;
      A.entries[js * N + k] = e;
    }
  });
  A.overflow = std::any_of(bad.begin(), bad.end(), [](char b) { return b != 0; });
  return A;
}

NormEstimate operator_norm_lower(const CompressionMatrix& A, double tol, int max_iter, std::uint64_t seed) {
  const int n = A.n;
  if (n == 0) return {0.0, 0, true};
  if (A.overflow) throw std::runtime_error("operator_norm_lower: matrix has non-finite entries");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<cplx> x(n), y(n), z(n);
  for (int i = 0; i < n; ++i) x[i] = cplx{1.0 + 1e-2 * unif(rng), 1e-2 * unif(rng)};
  double nx = norm2(x);
  for (auto& v : x) v /= nx;

  NormEstimate est;
  double lambda_prev = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    simd::cmatvec_adjoint(A.entries, n, n, x, y);
    simd::cmatvec(A.entries, n, n, y, z);
    const double ny = norm2(y);
    const double lambda = ny * ny;
    est.iterations = it;
    est.sigma = std::sqrt(lambda);
    const double nz = norm2(z);
    if (nz == 0.0) {
      est.converged = true;
      est.sigma = 0.0;
      break;
    }
    for (int i = 0; i < n; ++i) x[i] = z[i] / nz;
    if (lambda_prev > 0.0 && std::abs(lambda - lambda_prev) <= tol * lambda) {
      est.converged = true;
      // one more Rayleigh quotient on the updated vector
      simd::cmatvec_adjoint(A.entries, n, n, x, y);
      est.sigma = std::max(est.sigma, norm2(y));
      break;
    }
    lambda_prev = lambda;
  }
  return est;
}

std::string_view curve_verdict_name(CurveVerdict v) noexcept {
  switch (v) {
    case CurveVerdict::bounded_consistent: return "bounded-consistent";
    case CurveVerdict::unbounded_consistent: return "unbounded-consistent";
    case CurveVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

NormCurve norm_growth_curve(const PolynomialSymbol& g, const FockContext& ctx, std::vector<int> Ns, double plateau,
                            double blowup, std::uint64_t seed) {
  if (Ns.empty()) throw std::invalid_argument("norm_growth_curve: empty Ns");
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  const int n_max = Ns.back();
  if (n_max >= 4 && n_max % 4 == 0 && !std::binary_search(Ns.begin(), Ns.end(), n_max / 4)) {
    Ns.insert(std::lower_bound(Ns.begin(), Ns.end(), n_max / 4), n_max / 4);
  }
  const int trunc = std::max(n_max, g.degree());
  const TaylorFunction u = exp_taylor(g, trunc);
  const TaylorFunction v = exp_taylor(-g, trunc);
  const CompressionMatrix full = compression_matrix(u, v, ctx, n_max);

  NormCurve curve;
  curve.Ns = Ns;
  for (int n : Ns) {
    const NormEstimate e = operator_norm_lower(full.leading(n), 1e-10, 10000, seed);
    curve.sigmas.push_back(e.sigma);
    curve.iterations.push_back(e.iterations);
    curve.converged.push_back(e.converged);
  }
  const auto it = std::find(Ns.begin(), Ns.end(), n_max / 4);
  if (it != Ns.end() && curve.sigmas[it - Ns.begin()] > 0.0) {
    curve.growth_ratio = curve.sigmas.back() / curve.sigmas[it - Ns.begin()];
  } else {
    curve.growth_ratio = curve.sigmas.back() / curve.sigmas.front();
  }
  if (curve.growth_ratio < plateau) {
    curve.verdict = CurveVerdict::bounded_consistent;
  } else if (curve.growth_ratio > blowup) {
    curve.verdict = CurveVerdict::unbounded_consistent;
  } else {
    curve.verdict = CurveVerdict::inconclusive;
  }
  return curve;
}

double log_schur_H(const PolynomialSymbol& g, const FockContext& ctx, cplx z, cplx w) {
  const double m2 = 2.0 * ctx.m();
  return kernel(ctx, z, w).log_abs - 0.5 * (std::pow(std::abs(z), m2) + std::pow(std::abs(w), m2)) +
         g.real_part(z) - g.real_part(w);
}

double schur_H(const PolynomialSymbol& g, const FockContext& ctx, cplx z, cplx w) {
  return std::exp(log_schur_H(g, ctx, z, w));
}

LogIntegral log_schur_row(const PolynomialSymbol& g, const FockContext& ctx, cplx z, const QuadratureSpec& spec) {
  // terms depending only on z are pulled out of the integral
  const double m2 = 2.0 * ctx.m();
  const double outer = -0.5 * std::pow(std::abs(z), m2) + g.real_part(z);
  LogIntegral I = integrate_area_log(
      [&](cplx w) { return kernel(ctx, z, w).log_abs - 0.5 * std::pow(std::abs(w), m2) - g.real_part(w); }, spec);
  I.log_value += outer;
  return I;
}

namespace {

struct SupResult {
  std::vector<double> per_radius;  // max over phases of the combined row sums
  double sup = 0.0;
  double sup_plus = 0.0;   // sup of H_g alone
  double sup_minus = 0.0;  // sup of H_{-g} alone
  double max_err = 0.0;
};

SupResult schur_sup(const PolynomialSymbol& g, const FockContext& ctx, const std::vector<double>& grid,
                    const QuadratureSpec& spec, int n_phase) {
  const PolynomialSymbol mg = -g;
  SupResult out;
  out.per_radius.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int phases = grid[i] == 0.0 ? 1 : n_phase;
    for (int p = 0; p < phases; ++p) {
      const cplx z = std::polar(grid[i], 2.0 * std::numbers::pi * p / phases);
      const LogIntegral hp = log_schur_row(g, ctx, z, spec);
      const LogIntegral hm = log_schur_row(mg, ctx, z, spec);
      const double vp = std::exp(hp.log_value);
      const double vm = std::exp(hm.log_value);
      out.per_radius[i] = std::max(out.per_radius[i], vp + vm);
      out.sup_plus = std::max(out.sup_plus, vp);
      out.sup_minus = std::max(out.sup_minus, vm);
      out.max_err = std::max({out.max_err, hp.est_rel_err, hm.est_rel_err});
    }
    out.sup = std::max(out.sup, out.per_radius[i]);
  }
  return out;
}

}  // namespace

SchurFit fit_schur_constants(const FockContext& ctx, int d, const std::vector<double>& as,
                             const std::vector<double>& grid, const QuadratureSpec& spec, int n_phase) {
  if (as.size() < 2) throw std::invalid_argument("fit_schur_constants: need at least two values of a");
  SchurFit fit;
  fit.as = as;
  for (double a : as) {
    std::vector<cplx> c(static_cast<std::size_t>(d) + 1);
    c[d] = a;
    fit.sups.push_back(schur_sup(PolynomialSymbol(c), ctx, grid, spec, n_phase).sup);
  }
  // least squares: ln sup = ln C1 + C2 a^2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(as.size());
  for (std::size_t i = 0; i < as.size(); ++i) {
    const double x = as[i] * as[i];
    const double y = std::log(fit.sups[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.C2 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.C1 = std::exp((sy - fit.C2 * sx) / n);
  return fit;
}

SchurReport schur_bound(const PolynomialSymbol& g, const FockContext& ctx, const std::vector<double>& grid,
                        const QuadratureSpec& spec, int n_phase, bool fit_constants) {
  if (grid.empty()) throw std::invalid_argument("schur_bound: empty grid");
  SchurReport rep;
  rep.grid = grid;
  const SupResult direct = schur_sup(g, ctx, grid, spec, n_phase);
  rep.H_values = direct.per_radius;
  rep.sup_value = direct.sup;
  rep.max_est_rel_err = direct.max_err;

  // H_{g1+...+gk} <= prod H_{k g_j}^{1/k}; the constant term cancels
  const auto monos = g.monomials();
  if (monos.size() <= 1) {
    rep.assembled_bound = 2.0 * std::max(direct.sup_plus, direct.sup_minus);
  } else {
    const double k = static_cast<double>(monos.size());
    double log_bound = std::log(2.0);
    for (const auto& mono : monos) {
      const SupResult s = schur_sup(mono.scaled(k), ctx, grid, spec, n_phase);
      log_bound += std::log(std::max(s.sup_plus, s.sup_minus)) / k;
      rep.max_est_rel_err = std::max(rep.max_est_rel_err, s.max_err);
    }
    rep.assembled_bound = std::exp(log_bound);
  }
  rep.saturated = !std::isfinite(rep.sup_value) || rep.max_est_rel_err > 0.1;

  if (fit_constants) {
    rep.fit = fit_schur_constants(ctx, std::max(1, g.degree()), {0.25, 0.5, 1.0}, grid, spec, n_phase);
    rep.fitted_C1 = rep.fit.C1;
    rep.fitted_C2 = rep.fit.C2;
  }
  return rep;
}

KernelValue sarason_F(const PolynomialSymbol& g, cplx c, const FockContext& ctx, cplx z, cplx w) {
  const KernelValue kzw = kernel(ctx, z, w);
  const double lzz = kernel(ctx, z, z).log_abs;
  const double lww = kernel(ctx, w, w).log_abs;
  const cplx gz = g(z);
  const cplx gw = g(w);
  KernelValue F;
  F.branch = kzw.branch;
  F.est_rel_err = kzw.est_rel_err;
  F.log_abs = (c == cplx{} ? -kInf : std::log(std::abs(c))) + gz.real() - gw.real() + kzw.log_abs - 0.5 * (lzz + lww);
  F.phase = -std::arg(c) + gz.imag() + gw.imag() + kzw.phase;
  F.saturated = F.log_abs > 709.0;
  return F;
}

std::pair<cplx, cplx> sarason_test_points(const PolynomialSymbol& g, const FockContext& ctx, double x,
                                          double window_c) {
  const int d = g.degree();
  if (d < 1) throw std::invalid_argument("sarason_test_points: g must be non-constant");
  const double alpha = g.leading_arg();
  const double base = std::numbers::pi / (2.0 * d) - alpha / d;
  const double shift = window_c / (2.0 * ctx.m() * std::pow(x, ctx.m())) / d;
  return {std::polar(x, base), std::polar(x, base + shift)};
}

FGridReport sarason_F_grid(const PolynomialSymbol& g, cplx c, const FockContext& ctx, const std::vector<double>& caps,
                           int n_radial, int n_angular) {
  FGridReport rep;
  rep.radii = caps;
  for (double cap : caps) {
    std::vector<cplx> pts;
    for (int i = 1; i <= n_radial; ++i) {
      for (int j = 0; j < n_angular; ++j) {
        pts.push_back(std::polar(cap * i / n_radial, 2.0 * std::numbers::pi * j / n_angular));
      }
    }
    std::vector<double> row_max(pts.size(), -kInf);
    parallel_for(pts.size(), [&](std::size_t i) {
      for (const auto& w : pts) row_max[i] = std::max(row_max[i], sarason_F(g, c, ctx, pts[i], w).log_abs);
    });
    rep.max_log_abs_F.push_back(*std::max_element(row_max.begin(), row_max.end()));
  }
  return rep;
}

double weyl_norm_m1(cplx a) { return std::exp(0.5 * std::norm(a)); }

}  // namespace focklab

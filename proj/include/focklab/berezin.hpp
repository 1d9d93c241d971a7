#pragma once

#include <string>
#include <vector>

#include "focklab/quadrature.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

/// Berezin transform of |f|^2 at z, carried in log form.
struct BerezinSample {
  cplx z{};
  double value = 0.0;  // may overflow to inf; log_value is authoritative
  double log_value = 0.0;
  double est_abs_err = 0.0;
  double est_rel_err = 0.0;
};

/// Integral of |f(w)|^2 |K(w,z)|^2 dlambda(w) / K(z,z) for a truncated Taylor series f.
BerezinSample berezin_sq(const TaylorFunction& f, const FockContext& ctx, cplx z, const QuadratureSpec& spec);

/// Same for f = e^{g} evaluated exactly (no truncation or cancellation).
BerezinSample berezin_sq_exp(const PolynomialSymbol& g, const FockContext& ctx, cplx z, const QuadratureSpec& spec);

/// Product of the transforms of |u|^2 and |v|^2 at z.
BerezinSample berezin_product(const TaylorFunction& u, const TaylorFunction& v, const FockContext& ctx, cplx z,
                              const QuadratureSpec& spec);
BerezinSample berezin_product_exp(const PolynomialSymbol& g, const FockContext& ctx, cplx z,
                                  const QuadratureSpec& spec);

/// |e^{g(z)}|^2 times the transform of |e^{-g}|^2 at z.
BerezinSample curly_B(const PolynomialSymbol& g, const FockContext& ctx, cplx z, const QuadratureSpec& spec);

/// The same quantity with the angular integral restricted to |theta - arg z| <= c theta0(r |z|).
BerezinSample curly_B_window(const PolynomialSymbol& g, const FockContext& ctx, cplx z, double c,
                             double tol = 1e-10);

/// Smallest-magnitude phi with arg a_d + d phi = 0 mod 2 pi; ties go to the positive angle.
double worst_ray(const PolynomialSymbol& g);

/// |b|^2 e^{|a|^2 + 2 Re(conj(a) z)}, the exact transform of |b e^{conj(a) z}|^2 at m = 1.
double closed_form_berezin_m1(cplx a, cplx b, cplx z);
double log_closed_form_berezin_m1(cplx a, cplx b, cplx z);

struct RaySweep {
  double phi = 0.0;
  std::vector<double> xs;
  std::vector<double> log_values;
  std::vector<double> est_err;

  /// columns x,log_value,est_err
  std::string to_csv() const;
};

enum class RayQuantity { curly_B, product };

RaySweep berezin_ray_sweep(const PolynomialSymbol& g, const FockContext& ctx, double phi, const std::vector<double>& xs,
                           const QuadratureSpec& spec, RayQuantity q = RayQuantity::curly_B);

enum class RateBranch { bounded, growth_exponent, leading_coefficient };
std::string_view rate_branch_name(RateBranch b) noexcept;

struct RateReport {
  RateBranch branch = RateBranch::bounded;
  RaySweep sweep;
  double x_sat = 0.0;        // largest radius with est_rel_err < 10%
  double fitted_rate = 0.0;  // coefficient, exponent or bounded-growth slope depending on branch
  double target_rate = 0.0;
  double ratio = 0.0;
  double bounded_spread = 0.0;  // max - min of log B over the grid
  bool partial = false;
  bool pass = false;
};

/// Growth of log B along the worst ray.
///   d = 2m:      log B(x) / x^{2m} against 4a^2 / (1 + 2a)
///   m < d < 2m:  slope of ln log B against ln x over the top half, against 2d - 2m
///   d <= m:      slope of log B against ln x over the top half must stay below bounded_slope
RateReport rate_check(const PolynomialSymbol& g, const FockContext& ctx, const QuadratureSpec& spec,
                      const std::vector<double>& xs, double rate_tol = 0.25, double bounded_slope = 0.1);

}  // namespace focklab

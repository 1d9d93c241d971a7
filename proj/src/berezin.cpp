#include "focklab/berezin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "focklab/parallel.hpp"

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BerezinSample make_sample(cplx z, double log_value, double rel_err) {
  BerezinSample s;
  s.z = z;
  s.log_value = log_value;
  s.value = std::exp(log_value);
  s.est_rel_err = rel_err;
  s.est_abs_err = s.value * rel_err;
  return s;
}

BerezinSample transform(const std::function<double(cplx)>& log_abs_f, const FockContext& ctx, cplx z,
                        const QuadratureSpec& spec) {
  const double lkzz = kernel(ctx, z, z).log_abs;
  const LogIntegral I = integrate_plane_log(
      [&](cplx w) { return 2.0 * log_abs_f(w) + 2.0 * kernel(ctx, w, z).log_abs; }, ctx.m(), spec);
  return make_sample(z, I.log_value - lkzz, I.est_rel_err);
}

// least-squares slope of ys against xs
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

BerezinSample berezin_sq(const TaylorFunction& f, const FockContext& ctx, cplx z, const QuadratureSpec& spec) {
  return transform([&](cplx w) { return f.log_abs(w); }, ctx, z, spec);
}

BerezinSample berezin_sq_exp(const PolynomialSymbol& g, const FockContext& ctx, cplx z, const QuadratureSpec& spec) {
  return transform([&](cplx w) { return g.real_part(w); }, ctx, z, spec);
}

BerezinSample berezin_product(const TaylorFunction& u, const TaylorFunction& v, const FockContext& ctx, cplx z,
                              const QuadratureSpec& spec) {
  const BerezinSample bu = berezin_sq(u, ctx, z, spec);
  const BerezinSample bv = berezin_sq(v, ctx, z, spec);
  return make_sample(z, bu.log_value + bv.log_value, bu.est_rel_err + bv.est_rel_err);
}

BerezinSample berezin_product_exp(const PolynomialSymbol& g, const FockContext& ctx, cplx z,
                                  const QuadratureSpec& spec) {
  const BerezinSample bu = berezin_sq_exp(g, ctx, z, spec);
  const BerezinSample bv = berezin_sq_exp(-g, ctx, z, spec);
  return make_sample(z, bu.log_value + bv.log_value, bu.est_rel_err + bv.est_rel_err);
}

BerezinSample curly_B(const PolynomialSymbol& g, const FockContext& ctx, cplx z, const QuadratureSpec& spec) {
  const BerezinSample bv = berezin_sq_exp(-g, ctx, z, spec);
  return make_sample(z, 2.0 * g.real_part(z) + bv.log_value, bv.est_rel_err);
}

BerezinSample curly_B_window(const PolynomialSymbol& g, const FockContext& ctx, cplx z, double c, double tol) {
  const double x = std::abs(z);
  if (!(x > 0.0)) throw std::domain_error("curly_B_window: z must be non-zero");
  const double phi = std::arg(z);
  const double m = ctx.m();
  const GaussRule& gl = gauss_legendre(32);
  const auto radial = [&](double r) {
    if (r <= 0.0) return -kInf;
    const double half = std::min(std::numbers::pi, c * theta0(m, r * x));
    std::vector<double> terms(gl.x.size());
    double M = -kInf;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const cplx w = std::polar(r, phi + half * gl.x[i]);
      terms[i] = std::log(half * gl.w[i]) + 2.0 * kernel(ctx, w, z).log_abs - 2.0 * g.real_part(w);
      M = std::max(M, terms[i]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - M);
    return M + std::log(s) + std::log(r) - std::pow(r, 2.0 * m);
  };
  const LogIntegral I = integrate_line_log(radial, 0.0, kInf, tol, 1000);
  const double lkzz = kernel(ctx, z, z).log_abs;
  return make_sample(z, 2.0 * g.real_part(z) + I.log_value - lkzz, I.est_rel_err);
}

double worst_ray(const PolynomialSymbol& g) {
  const int d = g.degree();
  if (d < 1) throw std::invalid_argument("worst_ray: g must be non-constant");
  const double period = 2.0 * std::numbers::pi / d;
  double phi = std::remainder(-g.leading_arg() / d, period);
  if (std::abs(std::abs(phi) - period / 2.0) < 1e-12) phi = period / 2.0;
  if (std::abs(phi) < 1e-15) phi = 0.0;
  return phi;
}

double log_closed_form_berezin_m1(cplx a, cplx b, cplx z) {
  return std::log(std::norm(b)) + std::norm(a) + 2.0 * (std::conj(a) * z).real();
}

double closed_form_berezin_m1(cplx a, cplx b, cplx z) { return std::exp(log_closed_form_berezin_m1(a, b, z)); }

std::string RaySweep::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "x,log_value,est_err\n";
  for (std::size_t i = 0; i < xs.size(); ++i) os << xs[i] << ',' << log_values[i] << ',' << est_err[i] << '\n';
  return os.str();
}

RaySweep berezin_ray_sweep(const PolynomialSymbol& g, const FockContext& ctx, double phi, const std::vector<double>& xs,
                           const QuadratureSpec& spec, RayQuantity q) {
  if (!std::is_sorted(xs.begin(), xs.end()) || std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw std::invalid_argument("berezin_ray_sweep: radii must be strictly increasing");
  }
  RaySweep sweep;
  sweep.phi = phi;
  sweep.xs = xs;
  for (double x : xs) {
    const cplx z = std::polar(x, phi);
    const BerezinSample s =
        q == RayQuantity::curly_B ? curly_B(g, ctx, z, spec) : berezin_product_exp(g, ctx, z, spec);
    sweep.log_values.push_back(s.log_value);
    sweep.est_err.push_back(s.est_rel_err);
  }
  return sweep;
}

std::string_view rate_branch_name(RateBranch b) noexcept {
  switch (b) {
    case RateBranch::bounded: return "bounded";
    case RateBranch::growth_exponent: return "growth_exponent";
    case RateBranch::leading_coefficient: return "leading_coefficient";
  }
  return "unknown";
}

RateReport rate_check(const PolynomialSymbol& g, const FockContext& ctx, const QuadratureSpec& spec,
                      const std::vector<double>& xs, double rate_tol, double bounded_slope) {
  const int d = g.degree();
  const double m = ctx.m();
  if (d < 1) throw std::invalid_argument("rate_check: g must be non-constant");
  if (d > 2.0 * m + 1e-12) throw std::invalid_argument("rate_check: deg g exceeds 2m");
  RateReport rep;
  rep.sweep = berezin_ray_sweep(g, ctx, worst_ray(g), xs, spec);

  std::vector<double> sx, sl;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isfinite(rep.sweep.log_values[i]) && rep.sweep.est_err[i] < 0.1) {
      sx.push_back(xs[i]);
      sl.push_back(rep.sweep.log_values[i]);
    } else {
      rep.partial = true;
    }
  }
  if (sx.size() < 2) {
    rep.partial = true;
    return rep;
  }
  rep.x_sat = sx.back();
  const auto [lo, hi] = std::minmax_element(sl.begin(), sl.end());
  rep.bounded_spread = *hi - *lo;
  const std::size_t half = sx.size() / 2;
  const double a = g.leading_modulus();

  if (std::abs(d - 2.0 * m) <= 1e-12) {
    rep.branch = RateBranch::leading_coefficient;
    rep.fitted_rate = sl.back() / std::pow(rep.x_sat, 2.0 * m);
    rep.target_rate = 4.0 * a * a / (1.0 + 2.0 * a);
  } else if (d > m) {
    rep.branch = RateBranch::growth_exponent;
    std::vector<double> lx, lly;
    for (std::size_t i = half; i < sx.size(); ++i) {
      if (sl[i] <= 0.0) continue;
      lx.push_back(std::log(sx[i]));
      lly.push_back(std::log(sl[i]));
    }
    rep.fitted_rate = lx.size() >= 2 ? ls_slope(lx, lly) : 0.0;
    rep.target_rate = 2.0 * d - 2.0 * m;
  } else {
    rep.branch = RateBranch::bounded;
    std::vector<double> lx(sx.begin() + half, sx.end()), ly(sl.begin() + half, sl.end());
    for (auto& v : lx) v = std::log(v);
    rep.fitted_rate = ls_slope(lx, ly);
    rep.target_rate = 0.0;
    rep.pass = rep.fitted_rate <= bounded_slope;
    return rep;
  }
  rep.ratio = rep.fitted_rate / rep.target_rate;
  rep.pass = rep.ratio >= 1.0 / (1.0 + rate_tol) && rep.ratio <= 1.0 + rate_tol;
  return rep;
}

}  // namespace focklab

#include "focklab/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "focklab/fock_context.hpp"
#include "focklab/symbols.hpp"

namespace focklab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogMax = 709.0;
constexpr std::size_t kTableSize = 4096;
constexpr std::size_t kMaxTerms = 200000;

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

  static void add1(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  void add(cplx v) {
    add1(re, cre, v.real());
    add1(im, cim, v.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

struct SeriesResult {
  double log_abs = -kInf;
  double phase = 0.0;
  double log_abs_sum = -kInf;  // ln sum |t_k|
  double max_log_term = 0.0;
};

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-14 * std::max(1.0, std::abs(x)); }

// Combines exp(a) + exp(b) for complex logs a, b.
cplx log_add(cplx a, cplx b) {
  if (a.real() == -kInf) return b;
  if (b.real() == -kInf) return a;
  const double M = std::max(a.real(), b.real());
  const cplx s = std::exp(a - M) + std::exp(b - M);
  if (s == cplx{}) return {-kInf, 0.0};
  return {M + std::log(std::abs(s)), std::arg(s)};
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
  if (x == 1.0 || x == 2.0) return 0.0;
  return std::lgamma(x);
}

SignedLog log_rgamma(double x) {
  if (x > 0.0) return {-log_gamma(x), 1};
  if (near_integer(x)) return {-kInf, 0};
  // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
  const double s = std::sin(std::numbers::pi * x);
  return {log_gamma(1.0 - x) + std::log(std::abs(s)) - std::log(std::numbers::pi), s > 0 ? 1 : -1};
}

std::string_view branch_name(KernelBranch b) noexcept {
  switch (b) {
    case KernelBranch::series: return "series";
    case KernelBranch::asymptotic_principal: return "asymptotic_principal";
    case KernelBranch::oscillatory_series: return "oscillatory_series";
    case KernelBranch::oscillatory_asymptotic: return "oscillatory_asymptotic";
  }
  return "unknown";
}

cplx KernelValue::value() const {
  if (log_abs == -kInf) return {};
  const double mag = log_abs > kLogMax ? std::numeric_limits<double>::max() : std::exp(log_abs);
  return std::polar(mag, phase);
}

double KernelValue::abs() const {
  if (log_abs > kLogMax) return std::numeric_limits<double>::max();
  return std::exp(log_abs);
}

MittagLeffler::MittagLeffler(MittagLefflerParams p) : p_(p) {
  if (!(p_.m >= 1.0) || !std::isfinite(p_.m)) throw std::invalid_argument("MittagLeffler: m must be >= 1");
  if (!(p_.series_tol > 0.0)) throw std::invalid_argument("MittagLeffler: series_tol must be > 0");
  table_.resize(kTableSize);
  for (std::size_t k = 0; k < kTableSize; ++k) table_[k] = -log_gamma((k + 1) / p_.m);
  if (p_.switch_radius <= 0.0) p_.switch_radius = calibrate_switch_radius(p_.m, p_.series_tol);
}

double MittagLeffler::neg_lgamma(std::size_t k) const {
  if (k < table_.size()) return table_[k];
  return -log_gamma((k + 1) / p_.m);
}

namespace {

template <class NegLgamma>
SeriesResult sum_series(double m, double tol, cplx z, NegLgamma nl) {
  SeriesResult out;
  const double R = std::abs(z);
  if (R == 0.0) {
    out.log_abs = nl(0);
    out.log_abs_sum = out.log_abs;
    out.max_log_term = out.log_abs;
    return out;
  }
  const double lnR = std::log(R);
  const double phi = std::arg(z);
  const double peak = m * std::pow(R, m);
  const double log_tol = std::log(tol);

  std::vector<double> lt;
  lt.reserve(static_cast<std::size_t>(peak) + 64);
  double L = -kInf;
  int small_run = 0;
  for (std::size_t k = 0; k < kMaxTerms; ++k) {
    const double l = static_cast<double>(k) * lnR + nl(k);
    lt.push_back(l);
    L = std::max(L, l);
    if (static_cast<double>(k) > peak && l < L + log_tol) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
  }

  CompensatedSum acc;
  double abs_sum = 0.0;
  const cplx step = std::polar(1.0, phi);
  cplx rot{1.0, 0.0};
  for (std::size_t k = 0; k < lt.size(); ++k) {
    if (k % 64 == 0) rot = std::polar(1.0, static_cast<double>(k) * phi);
    const double mag = std::exp(lt[k] - L);
    acc.add(mag * rot);
    abs_sum += mag;
    rot *= step;
  }
  const cplx S = acc.value();
  out.max_log_term = L;
  out.log_abs_sum = L + std::log(abs_sum);
  if (std::abs(S) == 0.0) {
    out.log_abs = -kInf;
  } else {
    out.log_abs = L + std::log(std::abs(S));
    out.phase = std::arg(S);
  }
  return out;
}

}  // namespace

KernelValue MittagLeffler::series(cplx z) const {
  const auto r = sum_series(p_.m, p_.series_tol, z, [this](std::size_t k) { return neg_lgamma(k); });
  KernelValue v;
  v.branch = std::abs(std::arg(z)) <= std::numbers::pi / (2.0 * p_.m) ? KernelBranch::series
                                                                       : KernelBranch::oscillatory_series;
  v.log_abs = r.log_abs;
  v.phase = r.phase;
  const double log_kappa = r.log_abs_sum - r.log_abs;
  const double scale = 8.0 + std::abs(r.max_log_term) + std::abs(std::log(std::max(std::abs(z), 1e-300)));
  v.est_rel_err = r.log_abs == -kInf ? kInf : std::min(kInf, std::exp(log_kappa) * kEps * scale);
  v.saturated = v.log_abs > kLogMax;
  return v;
}

double MittagLeffler::series_condition(cplx z) const {
  const auto r = sum_series(p_.m, p_.series_tol, z, [this](std::size_t k) { return neg_lgamma(k); });
  if (r.log_abs == -kInf) return kInf;
  return std::exp(r.log_abs_sum - r.log_abs);
}

KernelValue MittagLeffler::asymptotic(cplx z) const {
  const double m = p_.m;
  const double R = std::abs(z);
  if (R == 0.0) throw std::domain_error("MittagLeffler::asymptotic: z = 0");
  const double phi = std::arg(z);
  const double lnR = std::log(R);
  const double Rm = std::pow(R, m);

  // exponential part: m z^{m-1} e^{z^m}
  cplx log_exp{-kInf, 0.0};
  if (std::abs(phi) <= std::numbers::pi / m * (1.0 + 1e-12)) {
    log_exp = cplx{std::log(m) + (m - 1.0) * lnR + Rm * std::cos(m * phi),
                   (m - 1.0) * phi + Rm * std::sin(m * phi)};
  }

  // algebraic part: -sum_{k>=2} z^{-k} / Gamma((1-k)/m), cut at the smallest term
  CompensatedSum alg;
  double alg_scale = 0.0;
  double omitted = 0.0;
  double prev = kInf;
  const std::size_t kmax = std::min<std::size_t>(kMaxTerms, 64 + static_cast<std::size_t>(2.0 * m * Rm));
  bool any_term = false;
  for (std::size_t k = 2; k <= kmax; ++k) {
    const SignedLog rg = log_rgamma((1.0 - static_cast<double>(k)) / m);
    if (rg.sign == 0) continue;
    const double l = -static_cast<double>(k) * lnR + rg.log_abs;
    const double mag = std::exp(l);
    if (any_term && mag >= prev) {
      omitted = mag;
      break;
    }
    const double ref = std::max(alg_scale, log_exp.real() > -kLogMax ? std::exp(std::min(log_exp.real(), kLogMax)) : 0.0);
    if (any_term && mag < 1e-3 * kEps * ref) {
      omitted = mag;
      break;
    }
    const cplx t = std::polar(mag, -static_cast<double>(k) * phi) * static_cast<double>(-rg.sign);
    alg.add(t);
    alg_scale = std::max(alg_scale, mag);
    prev = mag;
    any_term = true;
    omitted = 0.0;
  }
  const cplx a = alg.value();
  const cplx log_alg = std::abs(a) > 0.0 ? cplx{std::log(std::abs(a)), std::arg(a)} : cplx{-kInf, 0.0};
  const cplx total = log_add(log_exp, log_alg);

  KernelValue v;
  v.branch = std::abs(phi) <= std::numbers::pi / (2.0 * m) ? KernelBranch::asymptotic_principal
                                                           : KernelBranch::oscillatory_asymptotic;
  v.log_abs = total.real();
  v.phase = total.imag();
  if (v.log_abs == -kInf) {
    v.est_rel_err = kInf;
  } else {
    const double trunc = omitted > 0.0 ? std::exp(std::log(omitted) - v.log_abs) : 0.0;
    const double cancel = alg_scale > 0.0 ? std::exp(std::log(alg_scale) - v.log_abs) : 0.0;
    v.est_rel_err = trunc + kEps * (8.0 + Rm + cancel * 8.0);
  }
  v.saturated = v.log_abs > kLogMax;
  return v;
}

KernelValue MittagLeffler::operator()(cplx z) const {
  const double m = p_.m;
  const double R = std::abs(z);
  const double Rm = std::pow(R, m);
  if (Rm < 2.0) return series(z);
  const bool principal = std::abs(std::arg(z)) <= std::numbers::pi / (2.0 * m);
  if (principal) {
    if (R > p_.switch_radius) return asymptotic(z);
    KernelValue s = series(z);
    if (s.est_rel_err <= 1e-13) return s;
    KernelValue a = asymptotic(z);
    return a.est_rel_err < s.est_rel_err ? a : s;
  }
  KernelValue a = asymptotic(z);
  if (a.est_rel_err <= 4.0 * kEps * (8.0 + Rm)) return a;
  KernelValue s = series(z);
  return s.est_rel_err < a.est_rel_err ? s : a;
}

double MittagLeffler::calibrate_switch_radius(double m, double series_tol, double kappa_limit) {
  MittagLefflerParams p{m, series_tol, 1e300};
  MittagLeffler probe(p);
  const double arg = std::numbers::pi / (2.0 * m);
  for (double t = 1.0; t <= 400.0; t += 0.25) {
    const double R = std::pow(t, 1.0 / m);
    if (probe.series_condition(std::polar(R, arg)) > kappa_limit) return R;
  }
  return std::pow(400.0, 1.0 / m);
}

std::shared_ptr<const MittagLeffler> mittag_leffler_for(double m) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const MittagLeffler>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  auto ml = std::make_shared<const MittagLeffler>(MittagLefflerParams{m});
  cache.emplace(m, ml);
  return ml;
}

KernelValue mittag_leffler(const MittagLefflerParams& params, cplx z) {
  if (params.switch_radius <= 0.0 && params.series_tol == MittagLefflerParams{}.series_tol) {
    return (*mittag_leffler_for(params.m))(z);
  }
  return MittagLeffler(params)(z);
}

KernelValue kernel(const FockContext& ctx, cplx z, cplx w) {
  KernelValue v = ctx.ml()(z * std::conj(w));
  v.log_abs += std::log(ctx.m() / std::numbers::pi);
  v.saturated = v.log_abs > kLogMax;
  return v;
}

double log_kernel_diag_asymptotic(const FockContext& ctx, double x) {
  if (!(x > 0.0)) throw std::domain_error("kernel_diag_asymptotic: x must be positive");
  const double m = ctx.m();
  return 2.0 * std::log(m) - std::log(std::numbers::pi) + 2.0 * (m - 1.0) * std::log(x) + std::pow(x, 2.0 * m);
}

double kernel_diag_asymptotic(const FockContext& ctx, double x) {
  return std::exp(log_kernel_diag_asymptotic(ctx, x));
}

double theta0(double m, double r) {
  if (!(r > 0.0)) throw std::domain_error("theta0: r must be positive");
  return std::pow(r, -m / 2.0) / m;
}

PointwiseBound pointwise_bound_check(const FockContext& ctx, const TaylorFunction& f, cplx z, double eps_num) {
  PointwiseBound out;
  const double ln = log_fock_norm(f, ctx);
  if (!std::isfinite(ln)) throw std::runtime_error("pointwise_bound_check: divergent norm");
  out.log_lhs = f.log_abs(z);
  out.log_rhs = ln + 0.5 * kernel(ctx, z, z).log_abs;
  out.lhs = std::exp(out.log_lhs);
  out.rhs = std::exp(out.log_rhs);
  out.pass = out.log_lhs <= out.log_rhs + std::log1p(eps_num);
  return out;
}

}  // namespace focklab

#include "focklab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "focklab/parallel.hpp"
#include "focklab/simd.hpp"

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPanelOrder = 16;
constexpr double kScanStep = 0.05;
constexpr int kScanAngles = 128;
constexpr double kScanCap = 64.0;

double log_sum_exp(std::span<const double> v) {
  const double M = simd::max_value(v);
  if (M == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - M);
  return M + std::log(s);
}

struct Range {
  double lo;
  double hi;
  double width;  // extent of the region within 2 nats of the peak
};

// Radial log profile scan: p(r) approximates ln of the ring integral at r.
Range scan_radial(const std::function<double(double)>& profile, double r_start, double cut) {
  std::vector<double> rs, ps;
  double pmax = -kInf;
  double rpeak = r_start;
  for (double r = std::max(r_start, 0.5 * kScanStep); r <= kScanCap; r += kScanStep) {
    const double p = profile(r);
    rs.push_back(r);
    ps.push_back(p);
    if (p > pmax) {
      pmax = p;
      rpeak = r;
    }
    if (r > rpeak + 4 * kScanStep && p < pmax - cut) break;
  }
  if (pmax == -kInf) throw std::runtime_error("quadrature: integrand vanishes on the scan grid");
  double lo = rs.back(), hi = rs.front(), wlo = rpeak, whi = rpeak;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (ps[i] >= pmax - cut) {
      lo = std::min(lo, rs[i]);
      hi = std::max(hi, rs[i]);
    }
    if (ps[i] >= pmax - 2.0) {
      wlo = std::min(wlo, rs[i]);
      whi = std::max(whi, rs[i]);
    }
  }
  lo = std::max(r_start, lo - kScanStep);
  if (lo < 2 * kScanStep) lo = r_start;
  hi = hi + kScanStep;
  return {lo, hi, std::max(whi - wlo, kScanStep)};
}

cplx ipow(cplx z, int k) {
  cplx r{1.0, 0.0};
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

std::string node_name(double r, double theta) {
  std::ostringstream os;
  os.precision(17);
  os << "r=" << r << " theta=" << theta;
  return os.str();
}

// Composite rule nodes over [lo, hi] with P panels.
void composite_nodes(double lo, double hi, int panels, std::vector<double>& x, std::vector<double>& w) {
  const GaussRule& g = gauss_legendre(kPanelOrder);
  x.clear();
  w.clear();
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (int i = 0; i < kPanelOrder; ++i) {
      x.push_back(a + 0.5 * h * (g.x[i] + 1.0));
      w.push_back(0.5 * h * g.w[i]);
    }
  }
}

double radial_log_sum(const std::function<double(cplx)>& logf, double lo, double hi, int panels,
                      const QuadratureSpec& spec, int* max_ang) {
  std::vector<double> x, w;
  composite_nodes(lo, hi, panels, x, w);
  std::vector<double> ring(x.size());
  std::vector<int> used(x.size());
  const double ring_tol = std::max(1e-15, 0.1 * spec.tol);
  parallel_for(x.size(), [&](std::size_t i) {
    const double r = x[i];
    ring[i] = ring_log([&](double t) { return logf(std::polar(r, t)); }, ring_tol, std::max(spec.n_angular, 128),
                       spec.max_angular, &used[i]);
  });
  std::vector<double> terms(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) terms[i] = std::log(w[i]) + std::log(x[i]) + ring[i];
  if (max_ang) *max_ang = *std::max_element(used.begin(), used.end());
  return log_sum_exp(terms);
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double default_r_max(double m, double tol, double log_envelope) {
  return std::pow(std::max(1.0, std::log(1.0 / tol) + log_envelope), 1.0 / (2.0 * m));
}

double ring_log(const std::function<double(double)>& logf, double tol, int n0, int n_cap, int* n_used) {
  int n = std::max(8, n0);
  std::vector<double> vals(n);
  for (int j = 0; j < n; ++j) vals[j] = logf(-std::numbers::pi + kTwoPi * j / n);
  double prev = log_sum_exp(vals) + std::log(kTwoPi / n);
  int agree = 0;
  while (n < n_cap) {
    std::vector<double> next(2 * static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      next[2 * j] = vals[j];
      next[2 * j + 1] = logf(-std::numbers::pi + kTwoPi * (j + 0.5) / n);
    }
    vals.swap(next);
    n *= 2;
    const double cur = log_sum_exp(vals) + std::log(kTwoPi / n);
    const bool ok = (cur == -kInf && prev == -kInf) || std::abs(cur - prev) <= tol;
    prev = cur;
    if (ok) {
      if (++agree >= 2) break;
    } else {
      agree = 0;
    }
  }
  if (n_used) *n_used = n;
  return prev;
}

PlanarIntegral integrate_plane(const std::function<cplx(cplx)>& f, double m, const QuadratureSpec& spec) {
  if (spec.n_radial < 8 || spec.n_angular < 8 || spec.n_angular % 2 != 0) {
    throw std::invalid_argument("integrate_plane: need n_radial >= 8 and even n_angular >= 8");
  }
  double lo = spec.r_min, hi = spec.r_max;
  if (hi <= 0.0) {
    const double cut = std::log(1.0 / spec.tol) + 12.0;
    const auto profile = [&](double r) {
      double mx = -kInf;
      for (int j = 0; j < kScanAngles; ++j) {
        const cplx v = f(std::polar(r, -std::numbers::pi + kTwoPi * (j + 0.5) / kScanAngles));
        const double a = std::abs(v);
        if (a > 0.0 && std::isfinite(a)) mx = std::max(mx, std::log(a));
      }
      return mx - std::pow(r, 2.0 * m) + std::log(r);
    };
    const Range rg = scan_radial(profile, 0.0, cut);
    lo = 0.0;
    hi = std::max(rg.hi, default_r_max(m, spec.tol, spec.log_envelope) * 0.5);
  }

  const auto eval = [&](int panels, int n_ang) {
    std::vector<double> x, w;
    composite_nodes(lo, hi, panels, x, w);
    std::vector<cplx> ring(x.size());
    parallel_for(x.size(), [&](std::size_t i) {
      const double r = x[i];
      std::vector<cplx> vals(n_ang);
      for (int j = 0; j < n_ang; ++j) {
        const double t = -std::numbers::pi + kTwoPi * j / n_ang;
        const cplx v = f(std::polar(r, t));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
          throw std::runtime_error("integrate_plane: non-finite integrand at node " + node_name(r, t));
        }
        vals[j] = v;
      }
      const std::vector<double> ones(n_ang, kTwoPi / n_ang);
      ring[i] = simd::weighted_sum(ones, vals);
    });
    std::vector<double> rw(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rw[i] = w[i] * x[i] * std::exp(-std::pow(x[i], 2.0 * m));
    return simd::weighted_sum(rw, ring);
  };

  const int panels = std::max(1, spec.n_radial / kPanelOrder);
  const cplx v1 = eval(panels, spec.n_angular);
  const cplx v2 = eval(2 * panels, 2 * spec.n_angular);
  PlanarIntegral out;
  out.value = v2;
  out.est_abs_err = std::abs(v2 - v1);
  out.n_radial_used = 2 * panels * kPanelOrder;
  out.n_angular_used = 2 * spec.n_angular;
  out.r_min = lo;
  out.r_max = hi;
  return out;
}

LogIntegral integrate_area_log(const std::function<double(cplx)>& logf, const QuadratureSpec& spec) {
  const double cut = std::log(1.0 / spec.tol) + 12.0;
  double lo = spec.r_min, hi = spec.r_max, width = 0.0;
  if (hi <= 0.0) {
    const auto profile = [&](double r) {
      std::vector<double> v(kScanAngles);
      for (int j = 0; j < kScanAngles; ++j) v[j] = logf(std::polar(r, -std::numbers::pi + kTwoPi * (j + 0.5) / kScanAngles));
      return log_sum_exp(v) + std::log(r);
    };
    const Range rg = scan_radial(profile, std::max(0.0, spec.r_min), cut);
    lo = rg.lo;
    hi = rg.hi;
    width = rg.width;
  } else {
    width = hi - lo;
  }
  const double span = hi - lo;
  int panels = static_cast<int>(std::ceil(span / std::max(width / 3.0, kScanStep)));
  panels = std::clamp(panels, std::max(2, spec.n_radial / kPanelOrder), 512);

  LogIntegral out;
  out.r_min = lo;
  out.r_max = hi;
  int ang1 = 0, ang2 = 0;
  double l1 = radial_log_sum(logf, lo, hi, panels, spec, &ang1);
  double l2 = radial_log_sum(logf, lo, hi, 2 * panels, spec, &ang2);
  double err = std::abs(std::expm1(l2 - l1));
  while (err > 10.0 * spec.tol && panels < 1024) {
    panels *= 2;
    l1 = l2;
    ang1 = ang2;
    l2 = radial_log_sum(logf, lo, hi, 2 * panels, spec, &ang2);
    err = std::abs(std::expm1(l2 - l1));
  }
  out.log_value = l2;
  out.est_rel_err = err + std::max(1e-15, 0.1 * spec.tol);
  out.n_radial_used = 2 * panels * kPanelOrder;
  out.max_angular_used = std::max(ang1, ang2);
  return out;
}

LogIntegral integrate_plane_log(const std::function<double(cplx)>& logf, double m, const QuadratureSpec& spec) {
  return integrate_area_log([&](cplx z) { return logf(z) - std::pow(std::abs(z), 2.0 * m); }, spec);
}

LogIntegral integrate_line_log(const std::function<double(double)>& logf, double a, double b, double tol, int n_scan) {
  if (!(b > a)) throw std::invalid_argument("integrate_line_log: need b > a");
  const double cut = std::log(1.0 / tol) + 12.0;
  double B = b;
  if (!std::isfinite(b)) {
    // grow until the integrand is far below everything seen and still falling
    double seen = -kInf;
    B = a + 1.0;
    for (int it = 0; it < 60; ++it) {
      const int probes = 64;
      double last = -kInf;
      for (int j = 0; j <= probes; ++j) {
        const double t = a + (B - a) * j / probes;
        last = logf(t);
        seen = std::max(seen, last);
      }
      if (last < seen - cut - 20.0 && logf(B * 1.01 + 1e-3) < last) break;
      B = a + 2.0 * (B - a);
    }
  }
  n_scan = std::max(n_scan, 16);
  double pmax = -kInf;
  std::vector<double> ts(n_scan + 1), ps(n_scan + 1);
  for (int j = 0; j <= n_scan; ++j) {
    ts[j] = a + (B - a) * j / n_scan;
    ps[j] = logf(ts[j]);
    if (std::isnan(ps[j])) ps[j] = -kInf;
    pmax = std::max(pmax, ps[j]);
  }
  if (pmax == -kInf) throw std::runtime_error("integrate_line_log: integrand vanishes on the scan grid");
  int jlo = n_scan, jhi = 0, wlo = n_scan, whi = 0;
  for (int j = 0; j <= n_scan; ++j) {
    if (ps[j] >= pmax - cut) {
      jlo = std::min(jlo, j);
      jhi = std::max(jhi, j);
    }
    if (ps[j] >= pmax - 2.0) {
      wlo = std::min(wlo, j);
      whi = std::max(whi, j);
    }
  }
  const double lo = ts[std::max(0, jlo - 1)];
  const double hi = ts[std::min(n_scan, jhi + 1)];
  const double width = std::max(ts[std::min(n_scan, whi + 1)] - ts[std::max(0, wlo - 1)], (B - a) / n_scan);
  int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / width)), 4, 4096);

  const auto eval = [&](int P) {
    std::vector<double> x, w;
    composite_nodes(lo, hi, P, x, w);
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = std::log(w[i]) + logf(x[i]);
    return log_sum_exp(terms);
  };
  double l1 = eval(panels);
  double l2 = eval(2 * panels);
  double err = std::abs(std::expm1(l2 - l1));
  while (err > 10.0 * tol && panels < 16384) {
    panels *= 2;
    l1 = l2;
    l2 = eval(2 * panels);
    err = std::abs(std::expm1(l2 - l1));
  }
  LogIntegral out;
  out.log_value = l2;
  out.est_rel_err = err;
  out.n_radial_used = 2 * panels * kPanelOrder;
  out.r_min = lo;
  out.r_max = hi;
  return out;
}

LogIntegral integrate_interval_log(const std::function<double(double)>& logf, double a, double b, double tol,
                                   int min_panels) {
  if (!(b > a)) throw std::invalid_argument("integrate_interval_log: need b > a");
  const auto eval = [&](int P) {
    std::vector<double> x, w;
    composite_nodes(a, b, P, x, w);
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = std::log(w[i]) + logf(x[i]);
    return log_sum_exp(terms);
  };
  int panels = std::max(1, min_panels);
  double l1 = eval(panels);
  double l2 = eval(2 * panels);
  double err = std::abs(std::expm1(l2 - l1));
  int agree = err <= tol ? 1 : 0;
  while (agree < 2 && panels < 8192) {
    panels *= 2;
    l1 = l2;
    l2 = eval(2 * panels);
    err = std::abs(std::expm1(l2 - l1));
    agree = err <= tol ? agree + 1 : 0;
  }
  LogIntegral out;
  out.log_value = l2;
  out.est_rel_err = err;
  out.n_radial_used = 2 * panels * kPanelOrder;
  out.r_min = a;
  out.r_max = b;
  return out;
}

double log_moment(double m, int k) {
  if (k < 0) throw std::invalid_argument("moment: k must be >= 0");
  return std::log(std::numbers::pi / m) + log_gamma((k + 1) / m);
}

double moment(double m, int k) { return std::exp(log_moment(m, k)); }

GramReport gram_matrix(const FockContext& ctx, int kmax, const QuadratureSpec& spec) {
  if (kmax < 1) throw std::invalid_argument("gram_matrix: kmax must be >= 1");
  GramReport rep;
  rep.kmax = kmax;
  const int n = kmax + 1;
  rep.entries.assign(static_cast<std::size_t>(n) * n, cplx{});
  QuadratureSpec s = spec;
  if (s.r_max <= 0.0) s.log_envelope = 2.0 * kmax * std::log(default_r_max(ctx.m(), s.tol, 0.0) + 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k <= j; ++k) {
      const double scale = std::exp(-0.5 * (ctx.log_h(j) + ctx.log_h(k)));
      const PlanarIntegral I = integrate_plane(
          [&](cplx z) { return ipow(z, j) * ipow(std::conj(z), k) * scale; }, ctx.m(), s);
      rep.entries[static_cast<std::size_t>(j) * n + k] = I.value;
      rep.entries[static_cast<std::size_t>(k) * n + j] = std::conj(I.value);
      rep.max_est_err = std::max(rep.max_est_err, I.est_abs_err);
      if (j == k) {
        rep.max_diag_dev = std::max(rep.max_diag_dev, std::abs(I.value - 1.0));
      } else {
        rep.max_offdiag = std::max(rep.max_offdiag, std::abs(I.value));
      }
    }
  }
  return rep;
}

}  // namespace focklab

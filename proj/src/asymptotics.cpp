#include "focklab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "focklab/parallel.hpp"
#include "focklab/special_fn.hpp"

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kUncertain = 1e-6;

double log1p_pos(double a) { return std::log1p(std::max(0.0, a)); }

// ln |K(x, r e^{i theta})|; flags a kernel value whose own error estimate is large
double log_abs_K(const FockContext& ctx, double x, double r, double theta, bool& uncertain) {
  const KernelValue k = kernel(ctx, cplx{x, 0.0}, std::polar(r, theta));
  if (k.est_rel_err > kUncertain) uncertain = true;
  return k.log_abs;
}

double pow_d(double r, double d) { return d == 0.0 ? 1.0 : std::pow(r, d); }

// 2 * integral over [0, pi/(2m)] of e^{-(xr)^m + 2 a r^d sin^2(theta d / 2)} |K(x, r e^{i theta})|
double log_inner_angular(const FockContext& ctx, double x, double r, double a, double d, double tol, bool& unc) {
  const double m = ctx.m();
  const double base = -std::pow(x * r, m);
  const double rd = pow_d(r, d);
  const auto f = [&](double t) {
    const double s = std::sin(0.5 * t * d);
    return base + 2.0 * a * rd * s * s + log_abs_K(ctx, x, r, t, unc);
  };
  return std::log(2.0) + integrate_line_log(f, 0.0, kPi / (2.0 * m), tol, 64).log_value;
}

// 2 * integral over [pi/(2m), pi] of e^{-(xr)^m + a(x^d + r^d)} |K(x, r e^{i theta})|
double log_outer_angular(const FockContext& ctx, double x, double r, double a, double d, double tol, bool& unc) {
  const double m = ctx.m();
  const double base = -std::pow(x * r, m) + a * (pow_d(x, d) + pow_d(r, d));
  const auto f = [&](double t) { return base + log_abs_K(ctx, x, r, t, unc); };
  return std::log(2.0) + integrate_line_log(f, kPi / (2.0 * m), kPi, tol, 64).log_value;
}

// Past this radius e^{-(r^m - x^m)^2/2 + a r^d} is negligible against the peak of the ring integrands:
// with t = r^m - x^m and a r^d <= a(1 + x^m + t), t above a + sqrt(a^2 + 2 L) leaves a margin of L nats.
double ring_upper(double m, double x, double d, double a, double tol) {
  const double L = std::log(1.0 / tol) + 52.0 + a * (1.0 + std::pow(x, m)) + (d > 0.0 ? a * std::pow(x, d) : a);
  const double t = a + std::sqrt(a * a + 2.0 * L);
  return std::pow(std::pow(x, m) + t, 1.0 / m) + 1.0;
}

struct PointResult {
  std::vector<std::pair<std::string, double>> params;
  double log_lhs = 0.0;
  double log_env = 0.0;
  double log_aux = -kInf;  // second quantity some envelopes carry
  bool uncertain = false;
};

double max_ratio(const std::vector<PointResult>& pts, const std::vector<std::size_t>& idx) {
  double best = -kInf;
  for (std::size_t i : idx) best = std::max(best, pts[i].log_lhs - pts[i].log_env);
  return std::exp(best);
}

EnvelopeConstant make_constant(std::string name, double coarse, double refined) {
  EnvelopeConstant c;
  c.name = std::move(name);
  c.coarse = coarse;
  c.refined = refined;
  c.finite = std::isfinite(coarse) && std::isfinite(refined) && coarse > 0.0 && refined > 0.0;
  c.drift = c.finite ? std::abs(refined - coarse) / std::abs(coarse) : kInf;
  return c;
}

}  // namespace

double LaplaceEstimate::value() const { return std::exp(log_value); }

LaplaceEstimate laplace_estimate(const LaplaceProblem& p) {
  if (!(p.hi > p.lo)) throw std::invalid_argument("laplace_estimate: empty domain");
  double lo = p.lo, hi = p.hi;
  double flo = p.dh(lo), fhi = p.dh(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    throw std::runtime_error("laplace_estimate: no bracketed minimum (h' must go from - to + on the domain)");
  }
  double r = 0.5 * (lo + hi);
  LaplaceEstimate out;
  for (int it = 0; it < 200; ++it) {
    out.iterations = it + 1;
    const double f = p.dh(r);
    if (f == 0.0) break;
    if (f < 0.0) lo = r; else hi = r;
    const double c = p.d2h(r);
    double next = c > 0.0 ? r - f / c : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - r);
    r = next;
    if (step <= 1e-15 * std::max(1.0, std::abs(r)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(r))) break;
  }
  out.r_x = r;
  out.c_x = p.d2h(r);
  if (!(out.c_x > 0.0)) throw std::runtime_error("laplace_estimate: degenerate phase, h''(r_x) <= 0");
  out.h_min = p.h(r);
  out.log_value = 0.5 * std::log(2.0 * kPi) - 0.5 * std::log(out.c_x) + p.log_S(r) - out.h_min;
  return out;
}

LogIntegral laplace_quadrature(const LaplaceProblem& p, double tol) {
  return integrate_line_log([&](double r) { return p.log_S(r) - p.h(r); }, p.lo, p.hi, tol);
}

double HxPhase::h(double r) const {
  const double t = std::pow(r, m) - std::pow(x, m);
  return t * t - 2.0 * a * (pow_d(x, d) - pow_d(r, d)) + C * (pow_d(r, d - 1) + pow_d(x, d - 1) + 1.0);
}

double HxPhase::dh(double r) const {
  double v = 2.0 * m * std::pow(r, m - 1) * (std::pow(r, m) - std::pow(x, m)) + 2.0 * a * d * pow_d(r, d - 1);
  if (C != 0.0 && d != 1.0) v += C * (d - 1) * std::pow(r, d - 2);
  return v;
}

double HxPhase::d2h(double r) const {
  double v = 2.0 * m * (m - 1) * std::pow(r, m - 2) * (std::pow(r, m) - std::pow(x, m)) +
             2.0 * m * m * std::pow(r, 2 * m - 2);
  if (d != 1.0) v += 2.0 * a * d * (d - 1) * std::pow(r, d - 2);
  if (C != 0.0 && d != 1.0 && d != 2.0) v += C * (d - 1) * (d - 2) * std::pow(r, d - 3);
  return v;
}

LaplaceProblem hx_laplace_problem(const HxPhase& ph) {
  LaplaceProblem p;
  const double m = ph.m, x = ph.x;
  p.log_S = [m, x](double r) {
    return r > 0.0 ? -0.5 * m * std::log(r * x) + (2.0 * m - 1.0) * std::log(r) : -kInf;
  };
  p.h = [ph](double r) { return ph.h(r); };
  p.dh = [ph](double r) { return ph.dh(r); };
  p.d2h = [ph](double r) { return ph.d2h(r); };
  p.lo = x / 4.0;
  p.hi = 4.0 * x;
  return p;
}

HxAnalysis hx_analyze(double m, double d, double a, double C, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("hx_analyze: x must be positive");
  if (d < 1.0 || d > 2.0 * m + 1e-12) throw std::invalid_argument("hx_analyze: need 1 <= d <= 2m");
  if (a < 0.0 || C < 0.0) throw std::invalid_argument("hx_analyze: need a >= 0 and C >= 0");
  const HxPhase ph{m, d, a, C, x};
  LaplaceProblem p = hx_laplace_problem(ph);
  // the minimizer sits below x when a is large; widen the bracket downward, then upward
  for (int k = 0; k < 200 && ph.dh(p.lo) >= 0.0 && p.lo > 1e-12 * x; ++k) p.lo *= 0.5;
  for (int k = 0; k < 200 && ph.dh(p.hi) <= 0.0; ++k) p.hi *= 2.0;
  const LaplaceEstimate est = laplace_estimate(p);
  HxAnalysis out;
  out.r_x = est.r_x;
  out.h_min = est.h_min;
  out.c_x = est.c_x;
  out.lo = p.lo;
  out.hi = p.hi;
  const bool top = std::abs(d - 2.0 * m) <= 1e-12;
  out.rho_x = top ? est.r_x / (std::pow(1.0 + 2.0 * a, -1.0 / m) * x) - 1.0 : est.r_x / x - 1.0;
  out.dh_at_rx = ph.dh(est.r_x);
  out.dh_scale = 2.0 * m * std::pow(x, 2.0 * m - 1.0);
  out.c_tau2 = est.c_x * est.r_x;
  return out;
}

HxRateReport rate_verify(double m, double d, double a, const std::vector<double>& xs, double tol) {
  if (xs.size() < 2 || !std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument("rate_verify: need at least two increasing radii");
  }
  HxRateReport rep;
  rep.m = m;
  rep.d = d;
  rep.a = a;
  rep.top_branch = std::abs(d - 2.0 * m) <= 1e-12;
  for (double x : xs) {
    HxRatePoint pt;
    pt.x = x;
    pt.an = hx_analyze(m, d, a, 0.0, x);
    if (rep.top_branch) {
      pt.r_ratio = pt.an.rho_x + 1.0;
      pt.h_ratio = -pt.an.h_min / (4.0 * a * a / (1.0 + 2.0 * a) * std::pow(x, 2.0 * m));
      pt.c_ratio = pt.an.c_x / (2.0 * m * m * std::pow(1.0 + 2.0 * a, -1.0 + 2.0 / m) * std::pow(x, 2.0 * m - 2.0));
    } else {
      pt.r_ratio = pt.an.rho_x / (-(a * d / (m * m)) * std::pow(x, d - 2.0 * m));
      pt.h_ratio = -pt.an.h_min / (a * a * d * d / (m * m) * std::pow(x, 2.0 * d - 2.0 * m));
      pt.c_ratio = pt.an.c_x / (2.0 * m * m * std::pow(x, 2.0 * m - 2.0));
    }
    rep.points.push_back(pt);
  }
  const auto check = [&](auto get) {
    const std::size_t n = rep.points.size();
    if (std::abs(get(rep.points.back()) - 1.0) > tol) return false;
    for (std::size_t i = n / 2 + 1; i < n; ++i) {
      const double prev = std::abs(get(rep.points[i - 1]) - 1.0);
      const double cur = std::abs(get(rep.points[i]) - 1.0);
      if (cur > prev + 1e-9) return false;
    }
    return true;
  };
  rep.r_pass = check([](const HxRatePoint& p) { return p.r_ratio; });
  rep.h_pass = check([](const HxRatePoint& p) { return p.h_ratio; });
  rep.c_pass = check([](const HxRatePoint& p) { return p.c_ratio; });
  rep.pass = rep.r_pass && rep.h_pass;
  return rep;
}

LogIntegral integral_I(double m, double d, double N, double a, double tol) {
  if (!(m > 0.0) || !(N > -1.0) || a < 0.0 || d < 0.0) {
    throw std::invalid_argument("integral_I: need m > 0, N > -1, a >= 0, d >= 0");
  }
  // r = e^s makes the integrand smooth at the origin
  const auto f = [=](double s) {
    return (N + 1.0) * s - 0.5 * std::exp(2.0 * m * s) + (d == 0.0 ? a : a * std::exp(d * s));
  };
  const double cut = std::log(1.0 / tol) + 12.0;
  const double peak_guess = std::max(0.0, f(0.0));
  const double s_lo = -(cut + 40.0 + peak_guess) / (N + 1.0) - 1.0;
  return integrate_line_log(f, s_lo, kInf, tol);
}

std::string_view envelope_name(EnvelopeId id) noexcept {
  switch (id) {
    case EnvelopeId::radial_growth: return "radial_growth";
    case EnvelopeId::scaled_tail: return "scaled_tail";
    case EnvelopeId::shifted_tail: return "shifted_tail";
    case EnvelopeId::sector_inner: return "sector_inner";
    case EnvelopeId::sector_outer: return "sector_outer";
    case EnvelopeId::ring_inner: return "ring_inner";
    case EnvelopeId::ring_outer: return "ring_outer";
    case EnvelopeId::kernel_sector: return "kernel_sector";
  }
  return "unknown";
}

std::vector<EnvelopeId> all_envelopes() {
  return {EnvelopeId::radial_growth, EnvelopeId::scaled_tail, EnvelopeId::shifted_tail, EnvelopeId::sector_inner,
          EnvelopeId::sector_outer,  EnvelopeId::ring_inner,  EnvelopeId::ring_outer,   EnvelopeId::kernel_sector};
}

EnvelopeId envelope_from_name(std::string_view name) {
  for (EnvelopeId id : all_envelopes()) {
    if (envelope_name(id) == name) return id;
  }
  throw std::invalid_argument("unknown envelope id '" + std::string(name) + "'");
}

std::vector<double> Axis::values() const {
  if (n < 1) throw std::invalid_argument("Axis: n must be >= 1");
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

EnvelopeGrid EnvelopeGrid::refined() const {
  EnvelopeGrid g = *this;
  g.a = a.refined();
  g.x = x.refined();
  g.n_theta = 2 * n_theta;
  return g;
}

EnvelopeGrid default_envelope_grid(EnvelopeId id, double m) {
  EnvelopeGrid g;
  g.ds.clear();
  for (int d = 0; d <= static_cast<int>(std::floor(m + 1e-12)); ++d) g.ds.push_back(d);
  switch (id) {
    case EnvelopeId::radial_growth:
      g.a = {0.0, 8.0, 9};
      g.N = 1.0;
      break;
    case EnvelopeId::scaled_tail:
    case EnvelopeId::shifted_tail:
      g.a = {0.0, 4.0, 9};
      g.x = {0.5, 3.0, 11};
      g.N = 1.0;
      g.p = 1.0;
      g.R = 1.0;
      g.delta = 0.5;
      break;
    case EnvelopeId::sector_inner:
    case EnvelopeId::sector_outer:
      g.a = {0.0, 2.0, 3};
      g.x = {10.0, 40.0, 4};
      break;
    case EnvelopeId::ring_inner:
    case EnvelopeId::ring_outer:
      g.a = {0.0, 2.0, 5};
      g.x = {1.0, 4.0, 7};
      g.R = 2.0;
      g.tol = 1e-6;
      break;
    case EnvelopeId::kernel_sector:
      g.ds = {0.0};
      g.x = {5.0, 40.0, 8};
      g.n_theta = 16;
      break;
  }
  return g;
}

namespace {

PointResult envelope_point(EnvelopeId id, const FockContext& ctx, const EnvelopeGrid& g, double d, double x,
                           double a) {
  const double m = ctx.m();
  const double tol = g.tol;
  PointResult pr;
  pr.params = {{"d", d}, {"a", a}};
  switch (id) {
    case EnvelopeId::radial_growth: {
      pr.params.push_back({"N", g.N});
      pr.log_lhs = integral_I(m, d, g.N, a, tol).log_value;
      pr.log_env = std::max(0.0, (g.N + 1.0) / m - 1.0) * log1p_pos(a) + 0.5 * a * a;
      break;
    }
    case EnvelopeId::scaled_tail: {
      pr.params.push_back({"x", x});
      const double x2m = std::pow(x, 2.0 * m), xd = pow_d(x, d);
      const auto f = [&](double r) {
        return -0.5 * x2m * (1.0 + std::pow(r, 2.0 * m)) + a * xd * (1.0 + g.delta * pow_d(r, d)) + g.N * std::log(r);
      };
      pr.log_lhs = (g.N + 1.0 - g.p) * std::log(x) + integrate_line_log(f, g.R / (x * x), kInf, tol).log_value;
      pr.log_env = std::max(0.0, (g.N + g.p + 1.0) / m - 1.0) * log1p_pos(a) + 0.5 * (1.0 + g.delta * g.delta) * a * a;
      // end of the substitution chain: e^{a^2/2} R^{-p} int_{R/x} e^{-r^{2m}/2 + a delta r^d} r^{N+p} dr
      const auto chain = [&](double r) {
        return -0.5 * std::pow(r, 2.0 * m) + a * g.delta * pow_d(r, d) + (g.N + g.p) * std::log(r);
      };
      pr.log_aux = 0.5 * a * a + (x < 1.0 ? a : 0.0) - g.p * std::log(g.R) +
                   integrate_line_log(chain, g.R / x, kInf, tol).log_value;
      break;
    }
    case EnvelopeId::shifted_tail: {
      pr.params.push_back({"x", x});
      const double x2m = std::pow(x, 2.0 * m), xd = pow_d(x, d);
      const auto f = [&](double r) {
        const double t = 1.0 - std::pow(r, m);
        return -0.5 * x2m * t * t + a * xd * (1.0 - pow_d(r, d)) + 0.5 * m * std::log(r);
      };
      pr.log_lhs = m * std::log(x) + integrate_line_log(f, g.R / (x * x), kInf, tol).log_value;
      pr.log_env = log1p_pos(a) + 0.5 * a * a;
      break;
    }
    case EnvelopeId::sector_inner: {
      pr.params.push_back({"xr", x});
      const double r = std::sqrt(x), sm = std::pow(x, m), rd = pow_d(r, d);
      pr.log_lhs = log_inner_angular(ctx, r, r, a, d, tol, pr.uncertain);
      const auto t_int = [&](double t) { return -(sm - a * rd) * t * t; };
      pr.log_env = (m - 1.0) * std::log(x) + integrate_interval_log(t_int, 0.0, 1.0, tol, 2).log_value;
      break;
    }
    case EnvelopeId::sector_outer: {
      pr.params.push_back({"xr", x});
      const double r = std::sqrt(x);
      pr.log_lhs = log_outer_angular(ctx, r, r, a, d, tol, pr.uncertain);
      pr.log_env = -std::pow(x, m) + a * (pow_d(r, d) + pow_d(r, d)) - std::log(x);
      break;
    }
    case EnvelopeId::ring_inner:
    case EnvelopeId::ring_outer:
      throw std::logic_error("envelope_point: ring envelopes are evaluated per x by ring_points");
    case EnvelopeId::kernel_sector:
      throw std::logic_error("envelope_point: kernel_sector has its own driver");
  }
  return pr;
}

// Composite 16-point Gauss-Legendre nodes on [lo, hi], appended to (t, w).
void gl_nodes(double lo, double hi, int panels, std::vector<double>& t, std::vector<double>& w) {
  const GaussRule& gl = gauss_legendre(16);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (std::size_t k = 0; k < gl.x.size(); ++k) {
      t.push_back(a + 0.5 * h * (gl.x[k] + 1.0));
      w.push_back(0.5 * h * gl.w[k]);
    }
  }
}

double lse_weighted(const std::vector<double>& w, const std::vector<double>& terms) {
  double M = -kInf;
  for (double v : terms) M = std::max(M, v);
  if (M == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) s += w[i] * std::exp(terms[i] - M);
  return M + std::log(s);
}

// ln|K(x, r e^{i theta})| tabulated on a polar mesh for one x. |K| does not depend on (a, d),
// so every (a, d) pair of the grid reuses the table. Panel counts come from the peak widths:
// radial sigma 1/(m r^{m-1}) of e^{-(x^m - r^m)^2/2}, angular theta0(xr) on the axis, and decay
// length 1/(m (xr)^m) just past the sector edge; `level` doubles every count.
struct RingTable {
  std::vector<double> r, wr;
  std::vector<std::vector<double>> th, wth, lk;
};

RingTable ring_table(const FockContext& ctx, double x, double r_lo, double r_hi, bool inner, int level, bool& unc) {
  const double m = ctx.m();
  const double edge = kPi / (2.0 * m);
  const int mult = 1 << level;
  RingTable tb;
  const double sigma_r = 1.0 / (m * std::pow(std::max(1.0, r_hi), m - 1.0));
  const int pr = std::max(4, static_cast<int>(std::ceil((r_hi - r_lo) / (4.0 * sigma_r))));
  gl_nodes(r_lo, r_hi, pr * mult, tb.r, tb.wr);
  tb.th.resize(tb.r.size());
  tb.wth.resize(tb.r.size());
  tb.lk.resize(tb.r.size());
  parallel_for(tb.r.size(), [&](std::size_t i) {
    const double r = tb.r[i];
    const double s = x * r;
    auto& t = tb.th[i];
    auto& w = tb.wth[i];
    if (inner) {
      const int p = std::max(2, static_cast<int>(std::ceil(edge / (4.0 * theta0(m, s)))));
      gl_nodes(0.0, edge, p * mult, t, w);
    } else {
      const double decay = 1.0 / (m * std::pow(s, m));
      const double L = std::min(kPi - edge, 40.0 * decay);
      gl_nodes(edge, edge + L, std::max(2, static_cast<int>(std::ceil(L / (4.0 * decay)))) * mult, t, w);
      if (edge + L < kPi) gl_nodes(edge + L, kPi, 4 * mult, t, w);
    }
    bool u = false;
    tb.lk[i].resize(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) tb.lk[i][j] = log_abs_K(ctx, x, r, t[j], u);
    if (u) unc = true;
  });
  return tb;
}

// ln of the ring integral for one (a, d) from a table.
double ring_from_table(const RingTable& tb, bool inner, double m, double x, double a, double d) {
  const double xm = std::pow(x, m), xd = pow_d(x, d);
  std::vector<double> radial(tb.r.size());
  std::vector<double> terms;
  for (std::size_t i = 0; i < tb.r.size(); ++i) {
    const double r = tb.r[i];
    const double rd = pow_d(r, d);
    const auto& t = tb.th[i];
    terms.resize(t.size());
    double ang;
    if (inner) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        const double sn = std::sin(0.5 * t[j] * d);
        terms[j] = 2.0 * a * rd * sn * sn + tb.lk[i][j];
      }
      ang = std::log(2.0) - std::pow(x * r, m) + lse_weighted(tb.wth[i], terms);
    } else {
      for (std::size_t j = 0; j < t.size(); ++j) terms[j] = tb.lk[i][j];
      ang = std::log(2.0) - std::pow(x * r, m) + a * (xd + rd) + lse_weighted(tb.wth[i], terms);
    }
    const double u = xm - std::pow(r, m);
    radial[i] = -0.5 * u * u + (inner ? a * (xd - rd) : 0.0) + ang + std::log(r);
  }
  return lse_weighted(tb.wr, radial);
}

// All (d, a) pairs at one x for ring_inner / ring_outer, with the mesh doubled until every pair
// agrees to tol.
std::vector<PointResult> ring_points(EnvelopeId id, const FockContext& ctx, const EnvelopeGrid& g, double x,
                                     const std::vector<double>& ds, const std::vector<double>& as) {
  const double m = ctx.m();
  const bool inner = id == EnvelopeId::ring_inner;
  const double a_max = *std::max_element(as.begin(), as.end());
  const double d_max = *std::max_element(ds.begin(), ds.end());
  const double r_lo = g.R / x;
  const double r_hi = std::max(ring_upper(m, x, d_max, a_max, g.tol), 2.0 * r_lo);
  bool unc = false;
  std::vector<double> prev, cur;
  const auto eval = [&](int level) {
    const RingTable tb = ring_table(ctx, x, r_lo, r_hi, inner, level, unc);
    std::vector<double> out;
    for (double d : ds) {
      for (double a : as) out.push_back(ring_from_table(tb, inner, m, x, a, d));
    }
    return out;
  };
  prev = eval(0);
  double err = kInf;
  for (int level = 1; level <= 4 && err > g.tol; ++level) {
    cur = eval(level);
    err = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k) err = std::max(err, std::abs(std::expm1(cur[k] - prev[k])));
    prev = cur;
  }
  std::vector<PointResult> pts;
  std::size_t k = 0;
  for (double d : ds) {
    for (double a : as) {
      PointResult pr;
      pr.params = {{"d", d}, {"a", a}, {"x", x}};
      pr.log_lhs = cur[k++];
      pr.log_env = inner ? (1.0 / m - 1.0) * log1p_pos(a) + a * a
                         : std::max(0.0, 2.0 / m - 1.0) * log1p_pos(a) + a * a;
      pr.uncertain = unc || err > g.tol;
      pts.push_back(std::move(pr));
    }
  }
  return pts;
}

// Evaluate on the refined grid; the coarse grid is the even-index subset of every axis.
struct GridRun {
  std::vector<PointResult> pts;
  std::vector<std::size_t> coarse;
};

GridRun run_grid(EnvelopeId id, const FockContext& ctx, const EnvelopeGrid& coarse) {
  const EnvelopeGrid fine = coarse.refined();
  const std::vector<double> as = fine.a.values();
  const bool uses_x = id != EnvelopeId::radial_growth;
  const std::vector<double> xs = uses_x ? fine.x.values() : std::vector<double>{0.0};
  struct Tuple {
    double d, x, a;
    bool coarse;
  };
  std::vector<Tuple> tuples;
  for (double d : coarse.ds) {
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      for (std::size_t ia = 0; ia < as.size(); ++ia) {
        tuples.push_back({d, xs[ix], as[ia], ix % 2 == 0 && ia % 2 == 0});
      }
    }
  }
  GridRun run;
  run.pts.resize(tuples.size());
  if (id == EnvelopeId::ring_inner || id == EnvelopeId::ring_outer) {
    // tuples are ordered d-major, then x, then a
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const std::vector<PointResult> pts = ring_points(id, ctx, coarse, xs[ix], coarse.ds, as);
      for (std::size_t id_ = 0; id_ < coarse.ds.size(); ++id_) {
        for (std::size_t ia = 0; ia < as.size(); ++ia) {
          run.pts[(id_ * xs.size() + ix) * as.size() + ia] = pts[id_ * as.size() + ia];
        }
      }
    }
  } else {
    parallel_for(tuples.size(), [&](std::size_t i) {
      run.pts[i] = envelope_point(id, ctx, coarse, tuples[i].d, tuples[i].x, tuples[i].a);
    });
  }
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].coarse) run.coarse.push_back(i);
  }
  return run;
}

}  // namespace

EnvelopeReport envelope_verify(EnvelopeId id, double m, const EnvelopeGrid& grid) {
  if (id == EnvelopeId::kernel_sector) return kernel_sector_verify(m, grid);
  const FockContext ctx(m);
  const GridRun run = run_grid(id, ctx, grid);
  std::vector<std::size_t> all(run.pts.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  EnvelopeReport rep;
  rep.id = id;
  rep.m = m;
  rep.grid = grid;
  for (std::size_t i : run.coarse) {
    const PointResult& p = run.pts[i];
    rep.points.push_back({p.params, p.log_lhs, p.log_env, std::exp(p.log_lhs - p.log_env), p.uncertain});
  }
  for (const auto& p : run.pts) rep.oscillatory_uncertain = rep.oscillatory_uncertain || p.uncertain;
  rep.constants.push_back(make_constant("C", max_ratio(run.pts, run.coarse), max_ratio(run.pts, all)));
  rep.fitted_constant = rep.constants.front().coarse;
  {
    std::size_t best = 0;
    for (std::size_t i = 1; i < run.pts.size(); ++i) {
      if (run.pts[i].log_lhs - run.pts[i].log_env > run.pts[best].log_lhs - run.pts[best].log_env) best = i;
    }
    rep.argmax = run.pts[best].params;
  }
  bool chain_ok = true;
  if (id == EnvelopeId::scaled_tail) {
    double worst = -kInf, worst_fine = -kInf;
    for (std::size_t i = 0; i < run.pts.size(); ++i) worst_fine = std::max(worst_fine, run.pts[i].log_lhs - run.pts[i].log_aux);
    for (std::size_t i : run.coarse) worst = std::max(worst, run.pts[i].log_lhs - run.pts[i].log_aux);
    rep.constants.push_back(make_constant("chain_ratio", std::exp(worst), std::exp(worst_fine)));
    chain_ok = worst_fine <= 1e-8;
    rep.note = "reconstructed: the first tail bound is checked against the end of its substitution chain, "
               "e^{a^2/2} R^{-p} int_{R/x}^inf e^{-r^{2m}/2 + a delta r^d} r^{N+p} dr (times e^a when x < 1)";
  }
  rep.pass = chain_ok;
  for (const auto& c : rep.constants) {
    // chain_ratio is a ratio <= 1 that need not be refinement-stable
    if (c.name == "chain_ratio") continue;
    rep.pass = rep.pass && c.finite && c.drift < 0.1;
  }
  return rep;
}

EnvelopeReport envelope_verify(EnvelopeId id, double m) { return envelope_verify(id, m, default_envelope_grid(id, m)); }

namespace {

struct SectorStats {
  double log_upper = -kInf;
  double log_outer = -kInf;
  double c = kInf;
  double log_lower = kInf;
  bool uncertain = false;
  std::vector<EnvelopePoint> points;
};

SectorStats sector_stats(const FockContext& ctx, const std::vector<double>& ss, int n_theta) {
  const double m = ctx.m();
  const double edge = kPi / (2.0 * m);
  SectorStats st;
  std::vector<SectorStats> per(ss.size());
  parallel_for(ss.size(), [&](std::size_t i) {
    const double s = ss[i];
    const double r = std::sqrt(s);
    const double sm = std::pow(s, m);
    const double lead = (m - 1.0) * std::log(s);
    SectorStats& p = per[i];
    for (int j = 0; j <= n_theta; ++j) {
      const double t = edge * j / n_theta;
      const double lk = log_abs_K(ctx, r, r, t, p.uncertain);
      p.log_upper = std::max(p.log_upper, lk - lead - sm * std::cos(m * t));
    }
    const double t0 = 1.2 * edge;
    for (int j = 0; j <= n_theta; ++j) {
      const double t = t0 + (kPi - t0) * j / n_theta;
      p.log_outer = std::max(p.log_outer, log_abs_K(ctx, r, r, t, p.uncertain) + std::log(s));
    }
    // largest c with |K(theta = c theta0)| >= |K(0)| / 2
    const double th0 = theta0(m, s);
    const double lk0 = log_abs_K(ctx, r, r, 0.0, p.uncertain);
    const auto gap = [&](double c) { return log_abs_K(ctx, r, r, c * th0, p.uncertain) - lk0 + std::log(2.0); };
    double lo = 0.0, hi = 0.5;
    while (gap(hi) > 0.0 && hi * th0 < edge) {
      lo = hi;
      hi *= 2.0;
    }
    hi = std::min(hi, edge / th0);
    for (int k = 0; k < 80; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) > 0.0) lo = mid; else hi = mid;
    }
    p.c = lo;
    p.points.push_back({{{"xr", s}}, p.log_upper + lead, lead, std::exp(p.log_upper), p.uncertain});
  });
  for (const auto& p : per) {
    st.log_upper = std::max(st.log_upper, p.log_upper);
    st.log_outer = std::max(st.log_outer, p.log_outer);
    st.c = std::min(st.c, p.c);
    st.uncertain = st.uncertain || p.uncertain;
    st.points.insert(st.points.end(), p.points.begin(), p.points.end());
  }
  // lower envelope over the common window |theta| <= c theta0; |K| is smallest at the window edge
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double s = ss[i];
    const double r = std::sqrt(s);
    const double lk = log_abs_K(ctx, r, r, st.c * theta0(m, s), st.uncertain);
    st.log_lower = std::min(st.log_lower, lk - (m - 1.0) * std::log(s) - std::pow(s, m));
  }
  return st;
}

}  // namespace

EnvelopeReport kernel_sector_verify(double m, const EnvelopeGrid& grid) {
  const FockContext ctx(m);
  const SectorStats coarse = sector_stats(ctx, grid.x.values(), grid.n_theta);
  const EnvelopeGrid fine_grid = grid.refined();
  const SectorStats fine = sector_stats(ctx, fine_grid.x.values(), fine_grid.n_theta);
  EnvelopeReport rep;
  rep.id = EnvelopeId::kernel_sector;
  rep.m = m;
  rep.grid = grid;
  rep.points = coarse.points;
  rep.oscillatory_uncertain = coarse.uncertain || fine.uncertain;
  rep.constants.push_back(make_constant("principal_upper", std::exp(coarse.log_upper), std::exp(fine.log_upper)));
  rep.constants.push_back(make_constant("outer_decay", std::exp(coarse.log_outer), std::exp(fine.log_outer)));
  rep.constants.push_back(make_constant("window_c", coarse.c, fine.c));
  rep.constants.push_back(make_constant("window_lower", std::exp(coarse.log_lower), std::exp(fine.log_lower)));
  rep.fitted_constant = rep.constants.front().coarse;
  rep.note = "outer check starts at 1.2 pi/(2m); window_c is the largest c keeping |K| above half its value on the axis";
  rep.pass = true;
  for (const auto& c : rep.constants) rep.pass = rep.pass && c.finite && c.drift < 0.1;
  return rep;
}

}  // namespace focklab

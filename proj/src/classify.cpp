#include "focklab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "focklab/berezin.hpp"
#include "focklab/toeplitz.hpp"

#ifndef FOCKLAB_CONFIG_DIR
#define FOCKLAB_CONFIG_DIR "config"
#endif

namespace focklab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Least-squares slope of ys against ln xs over the top half of the grid.
double top_half_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  const std::size_t start = n / 2 > 0 && n - n / 2 >= 2 ? n / 2 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(n - start);
  for (std::size_t i = start; i < n; ++i) {
    const double lx = std::log(xs[i]);
    sx += lx;
    sy += ys[i];
    sxx += lx * lx;
    sxy += lx * ys[i];
  }
  const double den = k * sxx - sx * sx;
  return den > 0 ? (k * sxy - sx * sy) / den : 0.0;
}

// Three-way reading of a growth statistic: "flat" below lo, "growing" above hi.
Evidence read_growth(bool expect_bounded, bool flat, bool growing) {
  if (expect_bounded) return flat ? Evidence::supports : growing ? Evidence::contradicts : Evidence::inconclusive;
  return growing ? Evidence::supports : flat ? Evidence::contradicts : Evidence::inconclusive;
}

EvidenceItem norm_curve_item(const PolynomialSymbol& g, const FockContext& ctx, const Thresholds& th,
                             const ClassifyOptions& opt, bool bounded, double& sigma_max) {
  const NormCurve c = norm_growth_curve(g, ctx, opt.Ns, th.plateau, th.blowup, opt.seed);
  sigma_max = *std::max_element(c.sigmas.begin(), c.sigmas.end());
  EvidenceItem e{"norm_curve", Evidence::inconclusive, "", to_json(c)};
  const bool converged = std::all_of(c.converged.begin(), c.converged.end(), [](bool b) { return b; });
  e.status = read_growth(bounded, c.verdict == CurveVerdict::bounded_consistent,
                         c.verdict == CurveVerdict::unbounded_consistent);
  if (!converged && e.status == Evidence::contradicts) e.status = Evidence::inconclusive;
  e.detail = "sigma growth ratio " + fmt(c.growth_ratio) + " (" + std::string(curve_verdict_name(c.verdict)) + ")";
  if (!converged) e.detail += "; power iteration not converged at every N";
  return e;
}

EvidenceItem berezin_ray_item(const PolynomialSymbol& g, const FockContext& ctx, const Thresholds& th,
                              const ClassifyOptions& opt, bool bounded) {
  QuadratureSpec spec;
  spec.tol = opt.quad_tol;
  const RaySweep s = berezin_ray_sweep(g, ctx, worst_ray(g), opt.ray_xs, spec, RayQuantity::product);
  EvidenceItem e{"berezin_ray", Evidence::inconclusive, "", to_json(s)};
  const bool accurate = std::all_of(s.est_err.begin(), s.est_err.end(), [](double v) { return v < 0.1; });
  const double slope = top_half_log_slope(s.xs, s.log_values);
  e.data["slope"] = slope;
  if (!accurate) {
    e.detail = "quadrature error above 10% on the ray";
    return e;
  }
  e.status = read_growth(bounded, slope < th.bounded_growth_slope, slope >= 1.0);
  e.detail = "slope of log(B|u|^2 B|v|^2) against ln x over the top half: " + fmt(slope);
  return e;
}

EvidenceItem berezin_rate_item(const PolynomialSymbol& g, const FockContext& ctx, const Thresholds& th,
                               const ClassifyOptions& opt, bool bounded) {
  QuadratureSpec spec;
  spec.tol = opt.quad_tol;
  const RateReport r = rate_check(g, ctx, spec, opt.ray_xs, th.rate_tolerance, th.bounded_growth_slope);
  EvidenceItem e{"berezin_rate", Evidence::inconclusive, "", to_json(r)};
  e.detail = std::string(rate_branch_name(r.branch)) + " branch, fitted " + fmt(r.fitted_rate) + " vs target " +
             fmt(r.target_rate);
  if (r.partial) {
    e.detail += "; partial sweep";
    return e;
  }
  if (r.pass) {
    e.status = Evidence::supports;
  } else if (bounded) {
    e.status = Evidence::contradicts;
  }
  // a growth-rate mismatch on an unbounded symbol says nothing about boundedness
  return e;
}

EvidenceItem schur_item(const PolynomialSymbol& g, const FockContext& ctx, const ClassifyOptions& opt,
                        double sigma_max) {
  QuadratureSpec spec;
  spec.tol = opt.quad_tol;
  const SchurReport r = schur_bound(g, ctx, opt.schur_grid, spec, opt.schur_phases, false);
  EvidenceItem e{"schur", Evidence::inconclusive, "", to_json(r)};
  const double bound = r.assembled_bound;
  if (r.saturated || !std::isfinite(bound)) {
    e.detail = "Schur row sums saturated";
    return e;
  }
  const double slack = 1.0 + 10.0 * std::max(r.max_est_rel_err, 1e-9);
  e.status = bound * slack >= sigma_max ? Evidence::supports : Evidence::contradicts;
  e.detail = "Schur bound " + fmt(bound) + " against largest sigma " + fmt(sigma_max);
  return e;
}

EvidenceItem f_grid_item(const PolynomialSymbol& g, const FockContext& ctx, const Thresholds& th,
                         const ClassifyOptions& opt, bool bounded) {
  const cplx c{1.0, 0.0};
  const FGridReport grid = sarason_F_grid(g, c, ctx, opt.f_caps);
  std::vector<double> pair_log(opt.f_caps.size(), -std::numeric_limits<double>::infinity());
  if (g.degree() >= 1) {
    for (std::size_t i = 0; i < opt.f_caps.size(); ++i) {
      const auto [z, w] = sarason_test_points(g, ctx, opt.f_caps[i]);
      pair_log[i] = sarason_F(g, c, ctx, z, w).log_abs;
    }
  }
  std::vector<double> M(opt.f_caps.size());
  for (std::size_t i = 0; i < M.size(); ++i) M[i] = std::max(grid.max_log_abs_F[i], pair_log[i]);
  for (std::size_t i = 1; i < M.size(); ++i) M[i] = std::max(M[i], M[i - 1]);  // caps are nested

  EvidenceItem e{"F_grid", Evidence::inconclusive, "", to_json(grid)};
  e.data["pair_log_abs_F"] = pair_log;
  e.data["running_max_log_abs_F"] = M;
  if (M.size() < 2) {
    e.detail = "need at least two radius caps";
    return e;
  }
  const double top = M.back() - M[M.size() - 2];
  const double total = M.back() - M.front();
  e.status = read_growth(bounded, top < std::log(th.plateau), total > std::log(th.blowup));
  e.detail = "max|F| grew by a factor " + fmt(std::exp(total)) + " across the caps, " + fmt(std::exp(top)) +
             " over the last step";
  return e;
}

}  // namespace

Thresholds Thresholds::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read thresholds file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw std::runtime_error("thresholds file '" + path.string() + "': " + ex.what());
  }
  Thresholds t;
  t.plateau = j.at("plateau").get<double>();
  t.blowup = j.at("blowup").get<double>();
  t.rate_tolerance = j.at("rate_tolerance").get<double>();
  t.bounded_growth_slope = j.at("bounded_growth_slope").get<double>();
  t.provenance = j.value("provenance", json::object());
  if (!(t.plateau > 1.0) || !(t.blowup > t.plateau) || !(t.rate_tolerance > 0.0) || !(t.bounded_growth_slope > 0.0)) {
    throw std::runtime_error("thresholds file '" + path.string() + "': need 1 < plateau < blowup, positive tolerances");
  }
  return t;
}

std::filesystem::path default_thresholds_path() {
  if (const char* env = std::getenv("FOCKLAB_THRESHOLDS"); env && *env) return env;
  return std::filesystem::path(FOCKLAB_CONFIG_DIR) / "thresholds.json";
}

std::string_view evidence_name(Evidence e) noexcept {
  switch (e) {
    case Evidence::supports: return "supports";
    case Evidence::contradicts: return "contradicts";
    case Evidence::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view theorem_verdict_name(TheoremVerdict v) noexcept {
  switch (v) {
    case TheoremVerdict::bounded: return "bounded";
    case TheoremVerdict::unbounded: return "unbounded";
    case TheoremVerdict::not_applicable: return "not_applicable";
  }
  return "?";
}

ClassifierVerdict classify(const PolynomialSymbol& g, const FockContext& ctx, const Thresholds& th,
                           const ClassifyOptions& opt) {
  ClassifierVerdict out;
  out.membership_u = membership_test(g, ctx);
  out.membership_v = membership_test(-g, ctx);
  if (out.membership_u.verdict == Membership::not_in_space || out.membership_v.verdict == Membership::not_in_space) {
    out.verdict = TheoremVerdict::not_applicable;
    out.reason = "symbol not in space: " +
                 (out.membership_u.verdict == Membership::not_in_space ? out.membership_u.reason
                                                                       : out.membership_v.reason);
    return out;
  }

  const int d = g.degree();
  const bool bounded = d <= ctx.m();
  out.verdict = bounded ? TheoremVerdict::bounded : TheoremVerdict::unbounded;
  out.reason = "deg g = " + std::to_string(d) + (bounded ? " <= m = " : " > m = ") + fmt(ctx.m());
  if (out.membership_u.verdict == Membership::undetermined || out.membership_v.verdict == Membership::undetermined) {
    out.reason += "; membership of e^{+-g} undetermined at deg g = 2m, evidence gathered anyway";
  }

  double sigma_max = 0.0;
  out.evidence.push_back(norm_curve_item(g, ctx, th, opt, bounded, sigma_max));
  if (d >= 1) {
    out.evidence.push_back(berezin_ray_item(g, ctx, th, opt, bounded));
    out.evidence.push_back(berezin_rate_item(g, ctx, th, opt, bounded));
  } else {
    // constant symbol: T_u T_conj(v) is the identity and both transforms are constant
    out.evidence.push_back({"berezin_ray", Evidence::supports, "constant symbol, product identically 1", json::object()});
  }
  if (bounded) out.evidence.push_back(schur_item(g, ctx, opt, sigma_max));
  out.evidence.push_back(f_grid_item(g, ctx, th, opt, bounded));

  out.consistent = std::none_of(out.evidence.begin(), out.evidence.end(),
                                [](const EvidenceItem& e) { return e.status == Evidence::contradicts; });
  return out;
}

json to_json(const ClassifierVerdict& v) {
  json ev = json::array();
  for (const auto& e : v.evidence) {
    ev.push_back({{"name", e.name}, {"status", std::string(evidence_name(e.status))}, {"detail", e.detail},
                  {"data", e.data}});
  }
  return {{"theorem_verdict", std::string(theorem_verdict_name(v.verdict))},
          {"reason", v.reason},
          {"membership_u", to_json(v.membership_u)},
          {"membership_v", to_json(v.membership_v)},
          {"evidence", ev},
          {"consistent", v.consistent}};
}

}  // namespace focklab

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "focklab/asymptotics.hpp"
#include "focklab/berezin.hpp"
#include "focklab/classify.hpp"
#include "focklab/report.hpp"
#include "focklab/special_fn.hpp"
#include "focklab/toeplitz.hpp"

using namespace focklab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconsistent = 2;
constexpr int kExitUsage = 64;

struct Common {
  double m = 1.0;
  std::string out = ".";
  std::string name;
  std::uint64_t seed = 42;
  double tol = 1e-8;
};

struct Range {
  std::vector<double> v;  // lo hi n
  bool set() const { return v.size() == 3; }
  std::vector<double> values() const {
    const int n = static_cast<int>(v[2]);
    if (n < 1 || !(v[1] >= v[0])) throw std::invalid_argument("range needs lo <= hi and n >= 1");
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = n == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (n - 1);
    return xs;
  }
};

cplx parse_complex(const std::string& token) {
  const PolynomialSymbol p = PolynomialSymbol::parse(token);
  if (p.degree() != 0) throw std::invalid_argument("expected one complex number, got '" + token + "'");
  return p.coeff(0);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--m", c.m, "weight exponent m >= 1")->required()->check(CLI::Range(1.0, 1e6));
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--name", c.name, "report base name (default: the subcommand)");
  sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  sub->add_option("--tol", c.tol, "quadrature tolerance")->capture_default_str()->check(CLI::PositiveNumber);
}

QuadratureSpec spec_from(const Common& c) {
  QuadratureSpec s;
  s.tol = c.tol;
  return s;
}

json base_config(const std::string& cmd, const Common& c) {
  return {{"subcommand", cmd}, {"m", c.m}, {"seed", c.seed}, {"tol", c.tol}};
}

std::string name_or(const Common& c, const std::string& cmd) { return c.name.empty() ? cmd : c.name; }

void emit(const Common& c, const std::string& cmd, json config, json body, const std::vector<CurveRow>* rows = nullptr) {
  body["config"] = std::move(config);
  const auto path = write_report(c.out, name_or(c, cmd), cmd, std::move(body));
  std::cout << path.string() << '\n';
  if (rows) std::cout << write_curve(c.out, name_or(c, cmd), *rows).string() << '\n';
}

int run_ml_eval(const Common& c, const std::vector<std::string>& zs, const Range& real) {
  const auto ml = mittag_leffler_for(c.m);
  json cfg = base_config("ml-eval", c);
  json body;
  body["switch_radius"] = ml->switch_radius();
  json pts = json::array();
  for (const auto& t : zs) {
    const cplx z = parse_complex(t);
    pts.push_back({{"z", to_json(z)}, {"value", to_json((*ml)(z))}});
  }
  body["points"] = pts;
  cfg["z"] = zs;
  if (real.set()) {
    cfg["real_range"] = real.v;
    std::vector<CurveRow> rows;
    for (double x : real.values()) {
      const KernelValue v = (*ml)(cplx{x, 0.0});
      rows.emplace_back(x, v.log_abs, v.est_rel_err);
    }
    emit(c, "ml-eval", cfg, body, &rows);
  } else {
    emit(c, "ml-eval", cfg, body);
  }
  return kExitOk;
}

int run_kernel(const Common& c, const std::vector<std::string>& zw, const Range& diag) {
  const FockContext ctx(c.m);
  json cfg = base_config("kernel", c);
  json body;
  if (!zw.empty()) {
    if (zw.size() != 2) throw std::invalid_argument("--zw takes two complex numbers");
    const cplx z = parse_complex(zw[0]), w = parse_complex(zw[1]);
    cfg["zw"] = zw;
    body["value"] = to_json(kernel(ctx, z, w));
  }
  if (diag.set()) {
    // K(x, x) against its leading asymptotic term, in logs
    cfg["diag_range"] = diag.v;
    std::vector<CurveRow> rows;
    json pts = json::array();
    for (double x : diag.values()) {
      const KernelValue k = kernel(ctx, x, x);
      const double lr = k.log_abs - log_kernel_diag_asymptotic(ctx, x);
      rows.emplace_back(x, std::exp(lr), k.est_rel_err);
      pts.push_back({{"x", x}, {"log_K", k.log_abs}, {"ratio_to_asymptotic", std::exp(lr)}});
    }
    body["diagonal"] = pts;
    emit(c, "kernel", cfg, body, &rows);
    return kExitOk;
  }
  if (zw.empty()) throw std::invalid_argument("kernel needs --zw or --diag");
  emit(c, "kernel", cfg, body);
  return kExitOk;
}

int run_berezin(const Common& c, const std::string& gtext, const std::vector<std::string>& zs, const Range& ray,
                const std::string& quantity, bool rate) {
  const FockContext ctx(c.m);
  const PolynomialSymbol g = PolynomialSymbol::parse(gtext);
  const QuadratureSpec spec = spec_from(c);
  json cfg = base_config("berezin", c);
  cfg["g"] = g.to_string();
  cfg["quantity"] = quantity;
  json body;
  json pts = json::array();
  for (const auto& t : zs) {
    const cplx z = parse_complex(t);
    const BerezinSample s = quantity == "product" ? berezin_product_exp(g, ctx, z, spec) : curly_B(g, ctx, z, spec);
    pts.push_back(to_json(s));
  }
  cfg["z"] = zs;
  body["points"] = pts;
  if (!ray.set()) {
    if (zs.empty()) throw std::invalid_argument("berezin needs --z or --ray");
    emit(c, "berezin", cfg, body);
    return kExitOk;
  }
  if (g.degree() < 1) throw std::invalid_argument("--ray needs a non-constant symbol");
  cfg["ray"] = ray.v;
  cfg["rate"] = rate;
  const RayQuantity q = quantity == "product" ? RayQuantity::product : RayQuantity::curly_B;
  RaySweep sweep;
  if (rate) {
    if (q != RayQuantity::curly_B) throw std::invalid_argument("--rate applies to --quantity curly_B");
    const Thresholds th = Thresholds::load(default_thresholds_path());
    const RateReport r = rate_check(g, ctx, spec, ray.values(), th.rate_tolerance, th.bounded_growth_slope);
    body["rate"] = to_json(r);
    sweep = r.sweep;
  } else {
    sweep = berezin_ray_sweep(g, ctx, worst_ray(g), ray.values(), spec, q);
    body["sweep"] = to_json(sweep);
  }
  std::vector<CurveRow> rows;
  for (std::size_t i = 0; i < sweep.xs.size(); ++i) rows.emplace_back(sweep.xs[i], sweep.log_values[i], sweep.est_err[i]);
  emit(c, "berezin", cfg, body, &rows);
  return kExitOk;
}

int run_compress_norm(const Common& c, const std::string& gtext, const std::vector<int>& Ns) {
  const FockContext ctx(c.m);
  const PolynomialSymbol g = PolynomialSymbol::parse(gtext);
  const Thresholds th = Thresholds::load(default_thresholds_path());
  const NormCurve curve = norm_growth_curve(g, ctx, Ns, th.plateau, th.blowup, c.seed);
  json cfg = base_config("compress-norm", c);
  cfg["g"] = g.to_string();
  cfg["N"] = Ns;
  json body = {{"curve", to_json(curve)}, {"sigma", curve.sigmas.back()}};
  std::vector<CurveRow> rows;
  for (std::size_t i = 0; i < curve.Ns.size(); ++i) rows.emplace_back(curve.Ns[i], curve.sigmas[i], curve.converged[i] ? 0.0 : 1.0);
  emit(c, "compress-norm", cfg, body, &rows);
  return kExitOk;
}

int run_schur(const Common& c, const std::string& gtext, const std::vector<double>& grid, int phases, bool fit) {
  const FockContext ctx(c.m);
  const PolynomialSymbol g = PolynomialSymbol::parse(gtext);
  const SchurReport r = schur_bound(g, ctx, grid, spec_from(c), phases, fit);
  json cfg = base_config("schur", c);
  cfg["g"] = g.to_string();
  cfg["grid"] = grid;
  cfg["phases"] = phases;
  cfg["fit"] = fit;
  std::vector<CurveRow> rows;
  for (std::size_t i = 0; i < r.grid.size(); ++i) rows.emplace_back(r.grid[i], r.H_values[i], r.max_est_rel_err);
  emit(c, "schur", cfg, {{"schur", to_json(r)}}, &rows);
  return kExitOk;
}

int run_classify(const Common& c, const std::string& gtext, const std::string& thresholds_path) {
  const FockContext ctx(c.m);
  const PolynomialSymbol g = PolynomialSymbol::parse(gtext);
  const fs::path tp = thresholds_path.empty() ? default_thresholds_path() : fs::path(thresholds_path);
  const Thresholds th = Thresholds::load(tp);
  ClassifyOptions opt;
  opt.seed = c.seed;
  opt.quad_tol = c.tol;
  const ClassifierVerdict v = classify(g, ctx, th, opt);
  json cfg = base_config("classify", c);
  cfg["g"] = g.to_string();
  json body = to_json(v);
  body["thresholds"] = {{"plateau", th.plateau},
                        {"blowup", th.blowup},
                        {"rate_tolerance", th.rate_tolerance},
                        {"bounded_growth_slope", th.bounded_growth_slope}};
  emit(c, "classify", cfg, body);
  std::cout << "theorem_verdict=" << theorem_verdict_name(v.verdict) << " consistent=" << (v.consistent ? "true" : "false")
            << '\n';
  return v.consistent ? kExitOk : kExitInconsistent;
}

int run_laplace_check(const Common& c, double d, double a, double C, const Range& xr) {
  json cfg = base_config("laplace-check", c);
  cfg.erase("seed");
  cfg["d"] = d;
  cfg["a"] = a;
  cfg["C"] = C;
  cfg["x"] = xr.v;
  const std::vector<double> xs = xr.values();
  json pts = json::array();
  std::vector<CurveRow> rows;
  for (double x : xs) {
    const HxPhase ph{c.m, d, a, C, x};
    const HxAnalysis an = hx_analyze(c.m, d, a, C, x);
    LaplaceProblem p = hx_laplace_problem(ph);
    p.lo = an.lo;
    p.hi = an.hi;
    const LaplaceEstimate est = laplace_estimate(p);
    p.lo = 0.0;
    p.hi = std::max(an.hi, 4.0 * x);
    const LogIntegral quad = laplace_quadrature(p, c.tol);
    const double ratio = std::exp(est.log_value - quad.log_value);
    pts.push_back({{"x", x}, {"analysis", to_json(an)}, {"laplace", to_json(est)},
                   {"log_quadrature", quad.log_value}, {"ratio", ratio}});
    rows.emplace_back(x, ratio, quad.est_rel_err);
  }
  json body = {{"points", pts}};
  if (C == 0.0) body["rates"] = to_json(rate_verify(c.m, d, a, xs));
  emit(c, "laplace-check", cfg, body, &rows);
  return kExitOk;
}

int run_envelope(const Common& c, const std::string& id) {
  json cfg = base_config("envelope", c);
  cfg.erase("seed");
  cfg.erase("tol");
  cfg["id"] = id;
  std::vector<EnvelopeId> ids;
  if (id == "all") {
    ids = all_envelopes();
  } else {
    ids.push_back(envelope_from_name(id));
  }
  json reps = json::array();
  bool all_pass = true;
  for (EnvelopeId e : ids) {
    const EnvelopeReport r = envelope_verify(e, c.m);
    all_pass = all_pass && r.pass;
    reps.push_back(to_json(r));
    std::cout << envelope_name(e) << " pass=" << (r.pass ? "true" : "false") << '\n';
  }
  emit(c, "envelope", cfg, {{"envelopes", reps}, {"pass", all_pass}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for weighted Fock spaces: kernels, Berezin transforms, Toeplitz products"};
  app.require_subcommand(1);

  Common common;
  std::string g = "0";
  std::vector<std::string> zs, zw;
  Range real, diag, ray;
  std::string quantity = "curly_B";
  bool rate = false;
  std::vector<int> Ns{64};
  std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
  int phases = 8;
  bool fit = false;
  std::string thresholds;
  double d = 2.0, a = 0.3, C = 0.0;
  Range xr;
  std::string env_id = "all";

  auto* ml = app.add_subcommand("ml-eval", "E_{1/m,1/m} at points or along the real axis");
  add_common(ml, common);
  ml->add_option("--z", zs, "complex points, \"re\" or \"re+imi\"");
  ml->add_option("--real", real.v, "lo hi n: real-axis curve")->expected(3);

  auto* kn = app.add_subcommand("kernel", "reproducing kernel K_m(z, w)");
  add_common(kn, common);
  kn->add_option("--zw", zw, "z w")->expected(2);
  kn->add_option("--diag", diag.v, "lo hi n: K(x, x) against its leading asymptotic")->expected(3);

  auto* bz = app.add_subcommand("berezin", "Berezin transforms of |e^{+-g}|^2");
  add_common(bz, common);
  bz->add_option("--g", g, "coefficients, lowest degree first")->required();
  bz->add_option("--z", zs, "complex points");
  bz->add_option("--ray", ray.v, "lo hi n: sweep along the worst ray")->expected(3);
  bz->add_option("--quantity", quantity, "curly_B or product")
      ->check(CLI::IsMember({"curly_B", "product"}))
      ->capture_default_str();
  bz->add_flag("--rate", rate, "compare the ray growth against the leading-order rate");

  auto* cn = app.add_subcommand("compress-norm", "norm of P_N T_{e^g} T_{conj(e^{-g})} P_N");
  add_common(cn, common);
  cn->add_option("--g", g, "coefficients, lowest degree first")->required();
  cn->add_option("--N", Ns, "dimensions")->capture_default_str();

  auto* sc = app.add_subcommand("schur", "Schur-test upper bound");
  add_common(sc, common);
  sc->add_option("--g", g, "coefficients, lowest degree first")->required();
  sc->add_option("--grid", grid, "radii")->capture_default_str();
  sc->add_option("--phases", phases, "phases per radius")->capture_default_str()->check(CLI::PositiveNumber);
  sc->add_flag("--fit", fit, "also fit sup = C1 exp(C2 a^2) per monomial");

  auto* cl = app.add_subcommand("classify", "bounded/unbounded verdict with numerical evidence");
  add_common(cl, common);
  cl->add_option("--g", g, "coefficients, lowest degree first")->required();
  cl->add_option("--thresholds", thresholds, "thresholds JSON (default: config/thresholds.json)");

  auto* lp = app.add_subcommand("laplace-check", "Laplace estimate of the ray integral against quadrature");
  add_common(lp, common);
  lp->add_option("--d", d, "degree")->capture_default_str()->check(CLI::PositiveNumber);
  lp->add_option("--a", a, "leading coefficient modulus")->capture_default_str()->check(CLI::NonNegativeNumber);
  lp->add_option("--C", C, "lower-order constant in the phase")->capture_default_str();
  lp->add_option("--x", xr.v, "lo hi n")->expected(3)->required();

  auto* en = app.add_subcommand("envelope", "fitted constants of the integral envelopes");
  add_common(en, common);
  en->add_option("--id", env_id, "envelope id or 'all'")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  try {
    if (cmd == "ml-eval") return run_ml_eval(common, zs, real);
    if (cmd == "kernel") return run_kernel(common, zw, diag);
    if (cmd == "berezin") return run_berezin(common, g, zs, ray, quantity, rate);
    if (cmd == "compress-norm") return run_compress_norm(common, g, Ns);
    if (cmd == "schur") return run_schur(common, g, grid, phases, fit);
    if (cmd == "classify") return run_classify(common, g, thresholds);
    if (cmd == "laplace-check") return run_laplace_check(common, d, a, C, xr);
    if (cmd == "envelope") return run_envelope(common, env_id);
  } catch (const std::exception& ex) {
    const json diag_json = {{"schema", kReportSchema}, {"command", cmd}, {"error", ex.what()}};
    std::cerr << diag_json.dump(2) << '\n';
    try {
      std::filesystem::create_directories(common.out);
      write_report(common.out, name_or(common, cmd), cmd, {{"error", ex.what()}});
    } catch (const std::exception&) {
    }
    return kExitError;
  }
  return kExitError;
}

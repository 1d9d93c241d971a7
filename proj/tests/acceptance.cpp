// One line per acceptance criterion: PASS/FAIL, the measured quantities and the wall time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "focklab/asymptotics.hpp"
#include "focklab/berezin.hpp"
#include "focklab/quadrature.hpp"
#include "focklab/report.hpp"
#include "focklab/special_fn.hpp"
#include "focklab/toeplitz.hpp"

using namespace focklab;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

// 1
Outcome weyl() {
  const FockContext ctx(1.0);
  Outcome o{true, ""};
  for (double a : {0.5, 1.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const NormCurve c = norm_growth_curve(PolynomialSymbol({0, a}), ctx, {64});
    const double t = seconds_since(t0);
    const double r = c.sigmas.back() / weyl_norm_m1(a);
    o.pass = o.pass && r >= 0.98 && r <= 1.0 + 1e-12 && t < 10.0;
    o.detail += "a=" + fmt("%g", a) + " sigma/e^{a^2/2}=" + fmt("%.6f", r) + " in " + fmt("%.2fs", t) + "; ";
  }
  o.detail += "need [0.98, 1.00] and < 10 s each";
  return o;
}

// 2
Outcome berezin_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  const FockContext ctx(1.0);
  QuadratureSpec spec;
  spec.tol = 1e-8;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const cplx a = std::polar(0.05 * (i + 1), 2.1 * i);        // |a| up to 1
    const cplx b = std::polar(0.5 + 0.05 * i, -0.4 * i);
    const cplx z = std::polar(0.1 * (i + 1), 0.7 + 1.3 * i);   // |z| up to 2
    const PolynomialSymbol g({std::log(b), std::conj(a)});     // f = b e^{conj(a) z}
    const BerezinSample s = berezin_sq_exp(g, ctx, z, spec);
    worst = std::max(worst, std::abs(std::expm1(s.log_value - log_closed_form_berezin_m1(a, b, z))));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 30.0,
          "worst relative error " + fmt("%.2e", worst) + " over 20 points in " + fmt("%.1fs", t) + "; need <= 1e-6, < 30 s"};
}

// 3
Outcome dichotomy() {
  const auto t0 = std::chrono::steady_clock::now();
  const FockContext ctx(2.0);
  const NormCurve sq = norm_growth_curve(PolynomialSymbol({0, 0, 1}), ctx, {32, 96});
  const NormCurve cu = norm_growth_curve(PolynomialSymbol({0, 0, 0, 1}), ctx, {32, 96});
  const double rs = sq.sigmas.back() / sq.sigmas.front(), rc = cu.sigmas.back() / cu.sigmas.front();
  const double t = seconds_since(t0);
  return {rs < 1.05 && rc > 5.0 && t < 60.0, "m=2 sigma(96)/sigma(32): z^2 " + fmt("%.5f", rs) + " (< 1.05), z^3 " +
                                                 fmt("%.3f", rc) + " (> 5), " + fmt("%.1fs", t) + " (< 60 s)"};
}

// 4
Outcome mittag_leffler_accuracy() {
  const auto m1 = mittag_leffler_for(1.0);
  double w1 = 0.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j < 96; ++j) {
      const cplx z = std::polar(10.0 * i / 100, 2 * pi * j / 96);
      const cplx e = std::exp(z);
      w1 = std::max(w1, std::abs((*m1)(z).value() - e) / std::abs(e));
    }
  }
  const auto m2 = mittag_leffler_for(2.0);
  double w2 = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double x = 3.0 * i / 600;
    const double cf = x * std::exp(x * x) * (1.0 + std::erf(x)) + 1.0 / std::sqrt(pi);
    w2 = std::max(w2, std::abs((*m2)(x).value().real() - cf) / cf);
  }
  return {w1 <= 1e-12 && w2 <= 1e-10, "m=1 vs exp on |z|<=10: " + fmt("%.2e", w1) + " (<= 1e-12); m=2 vs erf form on [0,3]: " +
                                          fmt("%.2e", w2) + " (<= 1e-10)"};
}

// 5
Outcome kernel_asymptotics() {
  Outcome o{true, ""};
  for (double m : {1.0, 1.5, 2.0}) {
    const FockContext ctx(m);
    const double x = std::pow(36.0, 1.0 / (2.0 * m));
    const double r = std::exp(kernel(ctx, x, x).log_abs - log_kernel_diag_asymptotic(ctx, x));
    o.pass = o.pass && std::abs(r - 1.0) <= 0.02;
    o.detail += "m=" + fmt("%g", m) + " ratio " + fmt("%.6f", r) + "; ";
  }
  o.detail += "need within 2% of 1 at x^{2m}=36";
  return o;
}

// 6
Outcome reproducing_and_orthonormal() {
  double worst_rep = 0.0, worst_gram = 0.0;
  for (double m : {1.0, 1.5, 2.0}) {
    const FockContext ctx(m);
    for (int p = 0; p <= 3; ++p) {
      for (int i = 0; i < 10; ++i) {
        const cplx z = std::polar(0.2 * (i + 1), 0.9 * i + 0.3 * p);
        QuadratureSpec s;
        s.tol = 1e-10;
        s.log_envelope = 16.0 * std::abs(z);
        const PlanarIntegral q =
            integrate_plane([&](cplx w) { return kernel(ctx, z, w).value() * std::pow(w, p); }, m, s);
        worst_rep = std::max(worst_rep, std::abs(q.value - std::pow(z, p)) / (1.0 + std::pow(std::abs(z), p)));
      }
    }
    const GramReport g = gram_matrix(ctx, 5, QuadratureSpec{});
    worst_gram = std::max({worst_gram, g.max_offdiag, g.max_diag_dev});
  }
  return {worst_rep <= 1e-6 && worst_gram <= 1e-8, "reproducing worst " + fmt("%.2e", worst_rep) +
                                                       " (<= 1e-6); Gram deviation worst " + fmt("%.2e", worst_gram) +
                                                       " (<= 1e-8); m in {1, 1.5, 2}"};
}

// 7
Outcome laplace() {
  LaplaceProblem p;
  p.log_S = [](double) { return 0.0; };
  p.h = [](double r) { return (r - 5) * (r - 5); };
  p.dh = [](double r) { return 2 * (r - 5); };
  p.d2h = [](double) { return 2.0; };
  p.lo = 0;
  p.hi = 10;
  const double gauss_err = std::abs(laplace_estimate(p).value() / std::sqrt(pi) - 1.0);

  const HxPhase ph{1.0, 2.0, 0.3, 0.0, 8.0};
  const HxAnalysis an = hx_analyze(1.0, 2.0, 0.3, 0.0, 8.0);
  LaplaceProblem q = hx_laplace_problem(ph);
  q.lo = an.lo;
  q.hi = an.hi;
  const LaplaceEstimate est = laplace_estimate(q);
  q.lo = 0.0;
  q.hi = 32.0;
  const double ratio = std::exp(est.log_value - laplace_quadrature(q).log_value);

  std::vector<double> xs;
  for (int i = 0; i < 15; ++i) xs.push_back(2.0 + i);  // 2..16
  struct Case {
    double m, d, a;
  };
  bool rates = true;
  std::string rd;
  for (const Case& c : {Case{1, 2, 0.3}, Case{1, 2, 1.0}, Case{2, 4, 0.5}, Case{1, 1, 1.0}, Case{1.5, 2, 1.0},
                        Case{2, 3, 1.0}, Case{2, 1, 0.5}}) {
    const HxRateReport r = rate_verify(c.m, c.d, c.a, xs);
    const HxRatePoint& top = r.points.back();
    rates = rates && r.r_pass && r.h_pass && r.c_pass;
    rd += fmt("(m=%g", c.m) + fmt(",d=%g", c.d) + fmt(",a=%g): ", c.a) + fmt("r %.3f ", top.r_ratio) +
          fmt("h %.3f ", top.h_ratio) + fmt("c %.3f", top.c_ratio) + (r.r_pass && r.h_pass && r.c_pass ? "" : " FAIL") +
          "; ";
  }
  const bool pass = gauss_err <= 1e-12 && std::abs(ratio - 1.0) <= 0.05 && rates;
  return {pass, "Gaussian error " + fmt("%.1e", gauss_err) + "; ray phase m=1 d=2 a=0.3 x=8 Laplace/quadrature " +
                    fmt("%.4f", ratio) + "; top-of-grid (x=16) ratios " + rd};
}

// 8
Outcome envelopes() {
  bool pass = true;
  std::string d;
  for (double m : {1.0, 2.0}) {
    for (EnvelopeId id : all_envelopes()) {
      if (id == EnvelopeId::kernel_sector) continue;
      const EnvelopeReport r = envelope_verify(id, m);
      double drift = 0.0;
      for (const auto& c : r.constants) drift = std::max(drift, c.drift);
      pass = pass && r.pass;
      d += std::string(envelope_name(id)) + fmt("@m=%g ", m) + fmt("C=%.4g ", r.fitted_constant) +
           fmt("drift %.3f", drift) + (r.pass ? "" : " FAIL") + "; ";
    }
  }
  const double ratio = integral_I(1.0, 1.0, 1.0, 8.0).log_value / 64.0;
  pass = pass && ratio >= 0.45 && ratio <= 0.55;
  return {pass, d + "log I(8)/64 = " + fmt("%.4f", ratio) + " (in [0.45, 0.55])"};
}

// 9
Outcome no_universal_constant() {
  double a_hit = -1.0;
  for (int i = 0; i <= 300; ++i) {
    const double a = 0.01 * i;
    const double prod = closed_form_berezin_m1(a, 1.0, 0.0) * closed_form_berezin_m1(-a, 1.0, 0.0);  // e^{2a^2}
    const double norm2 = weyl_norm_m1(a) * weyl_norm_m1(a);                                         // e^{a^2}
    if (prod / norm2 > 100.0) {
      a_hit = a;
      break;
    }
  }
  const double at22 = std::exp(2 * 2.2 * 2.2) / std::exp(2.2 * 2.2);
  return {a_hit > 0 && a_hit <= 2.2 && at22 > 100.0,
          "product/norm^2 first exceeds 100 at |a| = " + fmt("%.2f", a_hit) + "; value at 2.2 = " + fmt("%.2f", at22)};
}

// 10
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "focklab_acceptance_determinism";
  fs::remove_all(dir);
  std::string hashes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / ("run" + std::to_string(k));
    const std::string cmd = std::string("\"") + FOCKLAB_CLI_PATH + "\" classify --m 1 --g \"0,0.5\" --seed 42 --out \"" +
                            out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "classify exited with status " + std::to_string(rc)};
    std::ifstream in(out / "classify.report.json", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    hashes[k] = fnv1a_hex(ss.str());
  }
  fs::remove_all(dir);
  return {hashes[0] == hashes[1], "report hashes " + hashes[0] + " / " + hashes[1]};
}

}  // namespace

int main() {
  run(1, "Weyl-norm oracle", weyl);
  run(2, "Berezin closed form", berezin_closed_form);
  run(3, "Boundedness dichotomy at m=2", dichotomy);
  run(4, "Mittag-Leffler accuracy", mittag_leffler_accuracy);
  run(5, "Kernel diagonal asymptotics", kernel_asymptotics);
  run(6, "Reproducing property and orthonormality", reproducing_and_orthonormal);
  run(7, "Laplace engine", laplace);
  run(8, "Envelope suite", envelopes);
  run(9, "No universal constant", no_universal_constant);
  run(10, "Determinism", determinism);
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}

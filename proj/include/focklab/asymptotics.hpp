#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "focklab/fock_context.hpp"
#include "focklab/quadrature.hpp"

namespace focklab {

/// Integral of S(r) e^{-h(r)} over [lo, hi]; S is passed as ln S.
struct LaplaceProblem {
  std::function<double(double)> log_S;
  std::function<double(double)> h;
  std::function<double(double)> dh;
  std::function<double(double)> d2h;
  double lo = 0.0;
  double hi = 0.0;
};

struct LaplaceEstimate {
  double r_x = 0.0;
  double c_x = 0.0;
  double h_min = 0.0;
  double log_value = 0.0;  // ln( sqrt(2 pi) c^{-1/2} S(r_x) e^{-h(r_x)} )
  int iterations = 0;
  double value() const;
};

/// Safeguarded Newton on h' inside [lo, hi]. Throws if h' does not change sign from - to +
/// or if h''(r_x) <= 0.
LaplaceEstimate laplace_estimate(const LaplaceProblem& p);

/// ln of the same integral by adaptive 1-D quadrature (the oracle for laplace_estimate).
LogIntegral laplace_quadrature(const LaplaceProblem& p, double tol = 1e-10);

/// h(r) = (r^m - x^m)^2 - 2a(x^d - r^d) + C(r^{d-1} + x^{d-1} + 1)
struct HxPhase {
  double m, d, a, C, x;
  double h(double r) const;
  double dh(double r) const;
  double d2h(double r) const;
};

struct HxAnalysis {
  double r_x = 0.0;
  double h_min = 0.0;
  double c_x = 0.0;
  double rho_x = 0.0;      // d = 2m: r_x / ((1+2a)^{-1/m} x) - 1, otherwise r_x / x - 1
  double dh_at_rx = 0.0;
  double dh_scale = 0.0;   // 2m x^{2m-1}, the size h' is measured against
  double c_tau2 = 0.0;     // c_x tau^2 with tau = sqrt(r_x)
  double lo = 0.0, hi = 0.0;
};

HxAnalysis hx_analyze(double m, double d, double a, double C, double x);

/// Laplace problem for the lower bound of B along the worst ray:
/// S(r) = (r x)^{-m/2} r^{2m-1}, phase h_x.
LaplaceProblem hx_laplace_problem(const HxPhase& ph);

struct HxRatePoint {
  double x = 0.0;
  HxAnalysis an;
  double r_ratio = 0.0;  // d = 2m: r_x / ((1+2a)^{-1/m} x);  d < 2m: rho_x / (-(a d / m^2) x^{d-2m})
  double h_ratio = 0.0;  // -h_min / target
  double c_ratio = 0.0;  // c_x / leading-order curvature
};

struct HxRateReport {
  double m = 0, d = 0, a = 0;
  bool top_branch = false;  // d = 2m
  std::vector<HxRatePoint> points;
  bool r_pass = false;
  bool h_pass = false;
  bool c_pass = false;
  bool pass = false;  // r_pass && h_pass
};

/// Ratios against the leading-order formulas; a ratio passes when it lies within 10% of 1 at
/// the largest x and |ratio - 1| does not increase over the top half of the grid.
HxRateReport rate_verify(double m, double d, double a, const std::vector<double>& xs, double tol = 0.1);

/// ln of the integral over (0, inf) of e^{-r^{2m}/2 + a r^d} r^N dr.
LogIntegral integral_I(double m, double d, double N, double a, double tol = 1e-12);

enum class EnvelopeId {
  radial_growth,  // I(a) <= C (1+a)^{max(0,(N+1)/m-1)} e^{a^2/2}
  scaled_tail,    // first tail integral, x-scaled, envelope (1+a)^{max(0,(N+p+1)/m-1)} e^{(1+delta^2)a^2/2}
  shifted_tail,   // second tail integral, envelope (1+a) e^{a^2/2}
  sector_inner,   // principal-sector angular integral against (xr)^{m-1} int_0^1 e^{-((xr)^m - a r^d) t^2} dt
  sector_outer,   // outer-sector angular integral against e^{-(xr)^m + a(x^d+r^d)} / (xr)
  ring_inner,     // radial integral of the inner piece against (1+a)^{1/m-1} e^{a^2}
  ring_outer,     // radial integral of the outer piece against (1+a)^{max(0,2/m-1)} e^{a^2}
  kernel_sector,  // pointwise kernel envelopes and the inner window
};

std::string_view envelope_name(EnvelopeId id) noexcept;
EnvelopeId envelope_from_name(std::string_view name);
std::vector<EnvelopeId> all_envelopes();

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
  std::vector<double> values() const;
  Axis refined() const { return {lo, hi, 2 * n - 1}; }
};

/// Parameter grid. For the sector and kernel envelopes `x` holds the product xr and the points
/// lie on the diagonal x = r.
struct EnvelopeGrid {
  Axis a{0.0, 0.0, 1};
  Axis x{1.0, 1.0, 1};
  std::vector<double> ds{1.0};
  double N = 1.0;
  double p = 1.0;
  double R = 1.0;
  double delta = 0.5;
  int n_theta = 16;  // kernel_sector only
  double tol = 1e-8;

  EnvelopeGrid refined() const;
};

EnvelopeGrid default_envelope_grid(EnvelopeId id, double m);

struct EnvelopePoint {
  std::vector<std::pair<std::string, double>> params;
  double log_lhs = 0.0;
  double log_envelope = 0.0;
  double ratio = 0.0;
  bool uncertain = false;
};

struct EnvelopeConstant {
  std::string name;
  double coarse = 0.0;
  double refined = 0.0;
  double drift = 0.0;  // |refined - coarse| / |coarse|
  bool finite = false;
};

struct EnvelopeReport {
  EnvelopeId id = EnvelopeId::radial_growth;
  double m = 1.0;
  EnvelopeGrid grid;
  std::vector<EnvelopePoint> points;          // coarse grid
  std::vector<EnvelopeConstant> constants;    // constants[0] is the fitted constant
  double fitted_constant = 0.0;
  std::vector<std::pair<std::string, double>> argmax;  // refined-grid point attaining the refined constant
  bool oscillatory_uncertain = false;         // some kernel value had est_rel_err above 1e-6
  std::string note;
  bool pass = false;                          // every constant finite, positive and drifting < 10%
};

EnvelopeReport envelope_verify(EnvelopeId id, double m, const EnvelopeGrid& grid);
EnvelopeReport envelope_verify(EnvelopeId id, double m);

/// Pointwise kernel checks on the diagonal x = r:
///   principal_upper  max |K| / ((xr)^{m-1} e^{(xr)^m cos(m theta)}) over |theta| <= pi/(2m)
///   outer_decay      max |K| xr over 1.2 pi/(2m) <= |theta| <= pi
///   window_c         smallest over the grid of the c where |K(x, r e^{i c theta0(xr)})| = |K(x, r)| / 2
///   window_lower     min |K| / ((xr)^{m-1} e^{(xr)^m}) over |theta| <= window_c theta0(xr)
EnvelopeReport kernel_sector_verify(double m, const EnvelopeGrid& grid);

}  // namespace focklab

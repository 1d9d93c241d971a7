#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "focklab/fock_context.hpp"

namespace focklab {

struct QuadratureSpec {
  int n_radial = 64;       // Gauss-Legendre nodes in r, in panels of 16
  int n_angular = 64;      // trapezoid nodes in theta (even)
  double r_max = 0.0;      // <= 0: chosen from a radial envelope scan
  double r_min = 0.0;
  double tol = 1e-12;
  double log_envelope = 0.0;  // ln of the integrand growth bound used when r_max is derived without a scan
  int max_angular = 1 << 15;  // cap for the adaptive ring rule
};

struct PlanarIntegral {
  cplx value{};
  double est_abs_err = 0.0;
  int n_radial_used = 0;
  int n_angular_used = 0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Integral of exp(log f) with its relative error estimate.
struct LogIntegral {
  double log_value = 0.0;
  double est_rel_err = 0.0;
  int n_radial_used = 0;
  int max_angular_used = 0;
  double r_min = 0.0;
  double r_max = 0.0;
};

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [-1, 1] (nodes by Newton on P_n).
const GaussRule& gauss_legendre(int n);

/// Default cutoff (ln(1/tol) + log_envelope)^{1/(2m)}.
double default_r_max(double m, double tol, double log_envelope);

/// Integral of f(z) e^{-|z|^{2m}} dA(z). Error from n vs 2n node comparison.
PlanarIntegral integrate_plane(const std::function<cplx(cplx)>& f, double m, const QuadratureSpec& spec);

/// Integral of exp(logf(z)) dA(z) for a positive integrand given in log form.
/// The angular rule is refined per ring until it settles; the radial range
/// comes from a log-envelope scan unless spec.r_max > 0.
LogIntegral integrate_area_log(const std::function<double(cplx)>& logf, const QuadratureSpec& spec);

/// Same with the weight e^{-|z|^{2m}} folded in.
LogIntegral integrate_plane_log(const std::function<double(cplx)>& logf, double m, const QuadratureSpec& spec);

/// ln of the integral of exp(logf(t)) over [a, b]; b may be +infinity.
LogIntegral integrate_line_log(const std::function<double(double)>& logf, double a, double b, double tol = 1e-12,
                               int n_scan = 8000);

/// ln of the integral of exp(logf) over a finite [a, b] by panel doubling, without a scan.
LogIntegral integrate_interval_log(const std::function<double(double)>& logf, double a, double b, double tol = 1e-12,
                                   int min_panels = 2);

/// ln of integral over theta in [-pi, pi) of exp(logf(theta)), adaptive trapezoid.
double ring_log(const std::function<double(double)>& logf, double tol, int n0, int n_cap, int* n_used = nullptr);

/// h_k = (pi/m) Gamma((k+1)/m), the integral of |z|^{2k} against the weight.
double moment(double m, int k);
double log_moment(double m, int k);

struct GramReport {
  int kmax = 0;
  std::vector<cplx> entries;  // (kmax+1) x (kmax+1), row-major
  double max_offdiag = 0.0;
  double max_diag_dev = 0.0;
  double max_est_err = 0.0;
};

GramReport gram_matrix(const FockContext& ctx, int kmax, const QuadratureSpec& spec);

}  // namespace focklab

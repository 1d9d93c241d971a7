#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

namespace focklab {

using cplx = std::complex<double>;

class FockContext;
struct TaylorFunction;

/// ln Gamma(x) for x > 0; throws std::domain_error otherwise.
double log_gamma(double x);

/// 1/Gamma(x) for any real x as log-magnitude and sign (sign 0 at the poles of Gamma).
struct SignedLog {
  double log_abs;
  int sign;
};
SignedLog log_rgamma(double x);

enum class KernelBranch { series, asymptotic_principal, oscillatory_series, oscillatory_asymptotic };

std::string_view branch_name(KernelBranch b) noexcept;

/// A complex number carried as log|v| and arg v.
struct KernelValue {
  double log_abs = 0.0;
  double phase = 0.0;
  KernelBranch branch = KernelBranch::series;
  double est_rel_err = 0.0;
  bool saturated = false;  // |v| exceeds the double range; only the log form is meaningful

  cplx value() const;
  double abs() const;
};

struct MittagLefflerParams {
  double m = 1.0;
  double series_tol = 1e-17;
  double switch_radius = 0.0;  // <= 0 selects the calibrated radius
};

/// E_{1/m,1/m}(z) for m >= 1.
///
/// Series: terms z^k / Gamma((k+1)/m) summed in scaled log form with
/// Neumaier compensation. Asymptotic: m z^{m-1} e^{z^m} (kept for
/// |arg z| <= pi/m) minus sum_{k>=2} z^{-k} / Gamma((1-k)/m), truncated at
/// the smallest term.
class MittagLeffler {
 public:
  explicit MittagLeffler(MittagLefflerParams p);

  KernelValue operator()(cplx z) const;
  KernelValue series(cplx z) const;
  KernelValue asymptotic(cplx z) const;

  /// sum |t_k| / |sum t_k| for the series at z.
  double series_condition(cplx z) const;

  double m() const noexcept { return p_.m; }
  double switch_radius() const noexcept { return p_.switch_radius; }
  const MittagLefflerParams& params() const noexcept { return p_; }

  /// Smallest |z| on the ray arg z = pi/(2m) where the series condition
  /// number exceeds kappa_limit.
  static double calibrate_switch_radius(double m, double series_tol, double kappa_limit = 1e12);

 private:
  double neg_lgamma(std::size_t k) const;

  MittagLefflerParams p_;
  std::vector<double> table_;  // -lnGamma((k+1)/m)
};

/// Shared evaluator with calibrated switch radius, built once per m.
std::shared_ptr<const MittagLeffler> mittag_leffler_for(double m);

KernelValue mittag_leffler(const MittagLefflerParams& params, cplx z);

/// K_m(z, w) = (m/pi) E_{1/m,1/m}(z conj(w)).
KernelValue kernel(const FockContext& ctx, cplx z, cplx w);

/// ln of (m^2/pi) x^{2(m-1)} e^{x^{2m}}, the leading term of K_m(x, x).
double log_kernel_diag_asymptotic(const FockContext& ctx, double x);
double kernel_diag_asymptotic(const FockContext& ctx, double x);

double theta0(double m, double r);

struct PointwiseBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  bool pass = false;
};

/// |f(z)| <= ||f|| K_m(z,z)^{1/2}.
PointwiseBound pointwise_bound_check(const FockContext& ctx, const TaylorFunction& f, cplx z,
                                     double eps_num = 1e-10);

}  // namespace focklab

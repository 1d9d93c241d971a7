#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "focklab/fock_context.hpp"

namespace focklab {

/// Polynomial g(z) = sum a_j z^j, coefficients lowest degree first.
class PolynomialSymbol {
 public:
  PolynomialSymbol() = default;
  explicit PolynomialSymbol(std::vector<cplx> coeffs);

  /// Parses "re" or "re+imi" tokens separated by commas, e.g. "0,1-2i,0.5i".
  static PolynomialSymbol parse(std::string_view text);

  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == cplx{}; }
  cplx coeff(int j) const;

  /// |a_d| and arg a_d; zero for constant symbols.
  double leading_modulus() const;
  double leading_arg() const;

  cplx operator()(cplx z) const;
  double real_part(cplx z) const { return (*this)(z).real(); }

  PolynomialSymbol operator-() const;
  PolynomialSymbol scaled(cplx s) const;
  /// z -> g(e^{i theta} z)
  PolynomialSymbol rotated(double theta) const;
  /// the monomials a_j z^j with a_j != 0, j >= 1
  std::vector<PolynomialSymbol> monomials() const;

  std::string to_string() const;

 private:
  std::vector<cplx> coeffs_{cplx{}};
};

/// Truncated Taylor series c_0..c_N.
struct TaylorFunction {
  std::vector<cplx> coeffs;
  double declared_tail_bound = 0.0;

  int N() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  cplx operator()(cplx z) const;
  /// ln|f(z)| evaluated with per-term scaling.
  double log_abs(cplx z) const;
  TaylorFunction truncated(int n) const;
};

TaylorFunction constant_function(cplx c);

/// Coefficients of e^g by (n+1) c_{n+1} = sum_{j=1}^{d} j a_j c_{n+1-j}, c_0 = e^{a_0}.
TaylorFunction exp_taylor(const PolynomialSymbol& g, int N);

/// exp_taylor with N grown until |c_N|^2 h_N <= 1e-18 * (partial norm)^2 for
/// 5 consecutive indices; tail bound = 10 x the last block sum.
TaylorFunction exp_taylor_auto(const PolynomialSymbol& g, const FockContext& ctx, int n_min = 8,
                               int n_cap = 4000);

std::vector<cplx> cauchy_product(const std::vector<cplx>& a, const std::vector<cplx>& b);

double log_fock_norm(const TaylorFunction& f, const FockContext& ctx);
double fock_norm(const TaylorFunction& f, const FockContext& ctx);

enum class Membership { in_space, not_in_space, undetermined };
std::string_view membership_name(Membership v) noexcept;

struct MembershipReport {
  Membership verdict = Membership::undetermined;
  std::string reason;
  std::vector<int> Ns;
  std::vector<double> log_partial_norms;
  bool divergence_flag = false;
};

/// Order obstruction for deg g > 2m, partial-norm sweep otherwise.
MembershipReport membership_test(const PolynomialSymbol& g, const FockContext& ctx,
                                 double divergence_ratio = 1.5);

/// sqrt(sum |a_j|^2)
double hardy_norm(const PolynomialSymbol& g);

}  // namespace focklab

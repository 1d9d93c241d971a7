#include "focklab/symbols.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace focklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  double M = -kInf;
  for (double x : v) M = std::max(M, x);
  if (M == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - M);
  return M + std::log(s);
}

double parse_real(std::string_view s, std::string_view token) {
  if (s.empty()) throw std::invalid_argument("bad coefficient token '" + std::string(token) + "'");
  if (s == "+") return 1.0;
  if (s == "-") return -1.0;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad coefficient token '" + std::string(token) + "'");
  }
  return v;
}

cplx parse_complex(std::string_view tok) {
  while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
  while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
  if (tok.empty()) throw std::invalid_argument("empty coefficient token");
  if (tok.back() != 'i') return {parse_real(tok, tok), 0.0};
  std::string_view body = tok.substr(0, tok.size() - 1);
  // split at the last sign that is not at position 0 and not part of an exponent
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, parse_real(body.empty() ? "+" : body, tok)};
  return {parse_real(body.substr(0, split), tok), parse_real(body.substr(split), tok)};
}

}  // namespace

PolynomialSymbol::PolynomialSymbol(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == cplx{}) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(cplx{});
  for (const auto& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("PolynomialSymbol: non-finite coefficient");
    }
  }
}

PolynomialSymbol PolynomialSymbol::parse(std::string_view text) {
  std::vector<cplx> c;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    c.push_back(parse_complex(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return PolynomialSymbol(std::move(c));
}

cplx PolynomialSymbol::coeff(int j) const {
  if (j < 0 || j >= static_cast<int>(coeffs_.size())) return {};
  return coeffs_[j];
}

double PolynomialSymbol::leading_modulus() const { return degree() == 0 ? 0.0 : std::abs(coeffs_.back()); }

double PolynomialSymbol::leading_arg() const { return degree() == 0 ? 0.0 : std::arg(coeffs_.back()); }

cplx PolynomialSymbol::operator()(cplx z) const {
  cplx acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

PolynomialSymbol PolynomialSymbol::operator-() const { return scaled(-1.0); }

PolynomialSymbol PolynomialSymbol::scaled(cplx s) const {
  std::vector<cplx> c = coeffs_;
  for (auto& x : c) x *= s;
  return PolynomialSymbol(std::move(c));
}

PolynomialSymbol PolynomialSymbol::rotated(double theta) const {
  std::vector<cplx> c = coeffs_;
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, theta * static_cast<double>(j));
  return PolynomialSymbol(std::move(c));
}

std::vector<PolynomialSymbol> PolynomialSymbol::monomials() const {
  std::vector<PolynomialSymbol> out;
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    if (coeffs_[j] == cplx{}) continue;
    std::vector<cplx> c(j + 1);
    c[j] = coeffs_[j];
    out.emplace_back(std::move(c));
  }
  return out;
}

std::string PolynomialSymbol::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    if (j) os << ',';
    os << coeffs_[j].real();
    if (coeffs_[j].imag() != 0.0) os << (coeffs_[j].imag() >= 0 ? "+" : "") << coeffs_[j].imag() << 'i';
  }
  return os.str();
}

cplx TaylorFunction::operator()(cplx z) const {
  cplx acc{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double TaylorFunction::log_abs(cplx z) const {
  const double R = std::abs(z);
  if (R == 0.0) return coeffs.empty() ? -kInf : std::log(std::abs(coeffs[0]));
  // plain Horner while it cannot overflow; same cancellation as the scaled sum below
  if (R <= 64.0 && coeffs.size() <= 128) {
    const double a = std::abs((*this)(z));
    if (std::isfinite(a) && a > 1e-250) return std::log(a);
  }
  const double lnR = std::log(R);
  double L = -kInf;
  std::vector<double> lt(coeffs.size(), -kInf);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double a = std::abs(coeffs[k]);
    if (a == 0.0) continue;
    lt[k] = std::log(a) + static_cast<double>(k) * lnR;
    L = std::max(L, lt[k]);
  }
  if (L == -kInf) return -kInf;
  const double phi = std::arg(z);
  cplx s{};
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (lt[k] == -kInf) continue;
    s += std::polar(std::exp(lt[k] - L), std::arg(coeffs[k]) + static_cast<double>(k) * phi);
  }
  const double a = std::abs(s);
  return a == 0.0 ? -kInf : L + std::log(a);
}

TaylorFunction TaylorFunction::truncated(int n) const {
  TaylorFunction t;
  t.coeffs.assign(coeffs.begin(), coeffs.begin() + std::min<std::size_t>(coeffs.size(), n + 1));
  t.declared_tail_bound = declared_tail_bound;
  return t;
}

TaylorFunction constant_function(cplx c) { return TaylorFunction{{c}, 0.0}; }

TaylorFunction exp_taylor(const PolynomialSymbol& g, int N) {
  const int d = g.degree();
  if (N < d) throw std::invalid_argument("exp_taylor: N must be >= deg g");
  TaylorFunction f;
  f.coeffs.assign(static_cast<std::size_t>(N) + 1, cplx{});
  f.coeffs[0] = std::exp(g.coeff(0));
  for (int n = 0; n < N; ++n) {
    cplx acc{};
    for (int j = 1; j <= std::min(d, n + 1); ++j) acc += static_cast<double>(j) * g.coeff(j) * f.coeffs[n + 1 - j];
    f.coeffs[n + 1] = acc / static_cast<double>(n + 1);
  }
  return f;
}

TaylorFunction exp_taylor_auto(const PolynomialSymbol& g, const FockContext& ctx, int n_min, int n_cap) {
  const int start = std::max(n_min, g.degree());
  TaylorFunction f = exp_taylor(g, n_cap);
  std::vector<double> lterm(f.coeffs.size(), -kInf);
  double log_partial = -kInf;
  int run = 0;
  for (int k = 0; k <= n_cap; ++k) {
    const double a = std::abs(f.coeffs[k]);
    if (a > 0.0) lterm[k] = 2.0 * std::log(a) + ctx.log_h(k);
    if (lterm[k] > -kInf) {
      const double M = std::max(log_partial, lterm[k]);
      log_partial = M + std::log(std::exp(log_partial - M) + std::exp(lterm[k] - M));
    }
    const bool small = lterm[k] <= std::log(1e-18) + log_partial;
    run = small ? run + 1 : 0;
    if (k >= start && run >= 5) {
      TaylorFunction t = f.truncated(k);
      const std::vector<double> block(lterm.begin() + (k - 4), lterm.begin() + k + 1);
      t.declared_tail_bound = 10.0 * std::exp(log_sum_exp(block));
      return t;
    }
  }
  throw std::runtime_error("exp_taylor_auto: truncation did not settle by N = " + std::to_string(n_cap));
}

std::vector<cplx> cauchy_product(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

double log_fock_norm(const TaylorFunction& f, const FockContext& ctx) {
  std::vector<double> lt;
  lt.reserve(f.coeffs.size());
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    const double a = std::abs(f.coeffs[k]);
    if (a > 0.0) lt.push_back(2.0 * std::log(a) + ctx.log_h(static_cast<int>(k)));
  }
  return 0.5 * log_sum_exp(lt);
}

double fock_norm(const TaylorFunction& f, const FockContext& ctx) { return std::exp(log_fock_norm(f, ctx)); }

std::string_view membership_name(Membership v) noexcept {
  switch (v) {
    case Membership::in_space: return "in_space";
    case Membership::not_in_space: return "not_in_space";
    case Membership::undetermined: return "undetermined";
  }
  return "unknown";
}

MembershipReport membership_test(const PolynomialSymbol& g, const FockContext& ctx, double divergence_ratio) {
  MembershipReport rep;
  const int d = g.degree();
  const double two_m = 2.0 * ctx.m();
  if (d > two_m + 1e-12) {
    rep.verdict = Membership::not_in_space;
    rep.reason = "order obstruction: deg g = " + std::to_string(d) + " exceeds 2m";
    return rep;
  }
  rep.Ns = {16, 32, 64, 128};
  const TaylorFunction f = exp_taylor(g, std::max(128, d));
  for (int n : rep.Ns) rep.log_partial_norms.push_back(log_fock_norm(f.truncated(n), ctx));
  for (std::size_t i = 1; i < rep.Ns.size(); ++i) {
    if (rep.log_partial_norms[i] - rep.log_partial_norms[i - 1] > std::log(divergence_ratio)) {
      rep.divergence_flag = true;
    }
  }
  if (std::abs(d - two_m) <= 1e-12) {
    rep.verdict = Membership::undetermined;
    rep.reason = "deg g = 2m: partial norms reported without a verdict";
  } else if (rep.divergence_flag) {
    rep.verdict = Membership::not_in_space;
    rep.reason = "partial norms grow by more than the divergence ratio between doublings";
  } else {
    rep.verdict = Membership::in_space;
    rep.reason = "deg g < 2m and partial norms settle";
  }
  return rep;
}

double hardy_norm(const PolynomialSymbol& g) {
  double s = 0.0;
  for (const auto& c : g.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace focklab

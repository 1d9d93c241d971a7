#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "focklab/fock_context.hpp"
#include "focklab/quadrature.hpp"
#include "focklab/special_fn.hpp"
#include "focklab/symbols.hpp"

using namespace focklab;
constexpr double pi = std::numbers::pi;

TEST_CASE("PolynomialSymbol: parsing and basic accessors") {
  const PolynomialSymbol g = PolynomialSymbol::parse("0,1-2i,0.5i");
  CHECK(g.degree() == 2);
  CHECK(g.coeff(1) == cplx{1, -2});
  CHECK(g.coeff(2) == cplx{0, 0.5});
  CHECK(g.leading_modulus() == doctest::Approx(0.5));
  CHECK(g.leading_arg() == doctest::Approx(pi / 2));
  CHECK(PolynomialSymbol::parse("0").is_zero());
  CHECK(PolynomialSymbol::parse("1,0,0").degree() == 0);  // trailing zeros dropped
  CHECK_THROWS_AS(PolynomialSymbol::parse("1,abc"), std::invalid_argument);
  CHECK_THROWS_AS(PolynomialSymbol::parse(""), std::invalid_argument);
  const PolynomialSymbol r = g.rotated(0.3);
  CHECK(std::abs(r(cplx{0.7, 0.2}) - g(std::polar(1.0, 0.3) * cplx{0.7, 0.2})) <= 1e-14);
  CHECK(PolynomialSymbol::parse(g.to_string()).coeffs() == g.coeffs());
}

TEST_CASE("exp_taylor: closed forms") {
  const TaylorFunction f0 = exp_taylor(PolynomialSymbol({0}), 4);
  CHECK(f0.coeffs == std::vector<cplx>{1, 0, 0, 0, 0});
  const TaylorFunction f1 = exp_taylor(PolynomialSymbol({0, 1}), 4);
  double fact = 1;
  for (int k = 0; k <= 4; ++k) {
    if (k) fact *= k;
    CHECK(f1.coeffs[k].real() == doctest::Approx(1.0 / fact).epsilon(1e-15));
  }
  const TaylorFunction f2 = exp_taylor(PolynomialSymbol({0, 0, 1}), 6);
  CHECK(f2.coeffs[2].real() == doctest::Approx(1.0));
  CHECK(f2.coeffs[4].real() == doctest::Approx(0.5));
  CHECK(f2.coeffs[6].real() == doctest::Approx(1.0 / 6));
  for (int k : {1, 3, 5}) CHECK(std::abs(f2.coeffs[k]) == 0.0);
}

TEST_CASE("exp_taylor(g) * exp_taylor(-g) = 1") {
  for (const char* s : {"0,1", "0.3,0,1-0.5i", "0,0.2,0,0.7i", "1,1,1,1"}) {
    const PolynomialSymbol g = PolynomialSymbol::parse(s);
    const int N = 60;
    const auto p = cauchy_product(exp_taylor(g, N).coeffs, exp_taylor(-g, N).coeffs);
    CHECK(std::abs(p[0] - 1.0) <= 1e-14);
    double worst = 0;
    for (int k = 1; k <= N; ++k) worst = std::max(worst, std::abs(p[k]));
    CAPTURE(s);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("fock_norm") {
  const FockContext c1(1.0), c2(2.0);
  CHECK(fock_norm(constant_function(1.0), c1) == doctest::Approx(std::sqrt(pi)));
  CHECK(fock_norm(exp_taylor(PolynomialSymbol({0, 0.5}), 80), c1) == doctest::Approx(std::sqrt(pi * std::exp(0.25))).epsilon(1e-14));
  // monotone in N
  const TaylorFunction f = exp_taylor(PolynomialSymbol({0, 1, 0.3}), 120);
  double prev = 0;
  for (int n = 0; n <= 120; n += 5) {
    const double v = log_fock_norm(f.truncated(n), c1);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  // m = 2, e^{z^2} truncated at 60 against the planar integral of |f|^2
  const TaylorFunction e = exp_taylor(PolynomialSymbol({0, 0, 1}), 60);
  QuadratureSpec s;
  s.tol = 1e-12;
  s.log_envelope = 2.0 * 36.0;
  const PlanarIntegral q = integrate_plane([&](cplx z) { return cplx{std::norm(e(z))}; }, 2.0, s);
  CHECK(std::sqrt(q.value.real()) == doctest::Approx(fock_norm(e, c2)).epsilon(1e-6));
}

TEST_CASE("exp_taylor_auto truncation rule") {
  const FockContext ctx(1.0);
  const TaylorFunction f = exp_taylor_auto(PolynomialSymbol({0, 1}), ctx);
  CHECK(f.declared_tail_bound >= 0.0);
  CHECK(fock_norm(f, ctx) == doctest::Approx(std::sqrt(pi * std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("membership_test") {
  const FockContext c1(1.0), c2(2.0);
  CHECK(membership_test(PolynomialSymbol({0, 0, 0, 1}), c1).verdict == Membership::not_in_space);
  const MembershipReport r = membership_test(PolynomialSymbol({0, 1}), c1);
  CHECK(r.verdict == Membership::in_space);
  CHECK(std::exp(r.log_partial_norms.back()) == doctest::Approx(std::sqrt(pi * std::exp(1.0))).epsilon(1e-12));
  CHECK(membership_test(PolynomialSymbol({0, 0, 0, 1}), c2).verdict == Membership::in_space);
  CHECK(membership_test(PolynomialSymbol({0, 0, 0.1}), c1).verdict == Membership::undetermined);
}

TEST_CASE("pointwise bound for e^g with deg g <= m") {
  for (double m : {1.0, 2.0}) {
    const FockContext ctx(m);
    const PolynomialSymbol g = m == 1.0 ? PolynomialSymbol({0, cplx{0.5, 0.5}}) : PolynomialSymbol({0, 0.3, 0.4});
    const TaylorFunction f = exp_taylor_auto(g, ctx);
    for (int i = 0; i < 10; ++i) {
      const cplx z = std::polar(0.3 * (i + 1), 1.1 * i);
      CHECK(pointwise_bound_check(ctx, f, z).pass);
    }
  }
}

TEST_CASE("hardy_norm") {
  CHECK(hardy_norm(PolynomialSymbol({1, 2})) == doctest::Approx(std::sqrt(5.0)));
  CHECK(hardy_norm(PolynomialSymbol({0})) == 0.0);
  CHECK(hardy_norm(PolynomialSymbol({0, 0, 0, cplx{0, 1}})) == doctest::Approx(1.0));
}

TEST_CASE("FockContext") {
  for (double m : {1.0, 1.5, 2.0}) {
    const FockContext ctx(m);
    for (int k = 0; k < 60; ++k) {
      CHECK(ctx.h(k) > 0.0);
      CHECK(ctx.log_h(k) == doctest::Approx(std::log(moment(m, k))).epsilon(1e-13));
      if (k >= 1) CHECK(ctx.log_h(k + 1) - ctx.log_h(k) >= ctx.log_h(k) - ctx.log_h(k - 1) - 1e-13);  // log-convexity
    }
  }
  CHECK_THROWS(FockContext(0.5));
}

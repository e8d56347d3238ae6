#include "doctest.h"

#include "freemult/errors.hpp"
#include "freemult/model.hpp"

#include <cmath>

using namespace freemult;

namespace {

ModelSpec model(GFunc g, XLaw x) { return ModelSpec{std::move(x), std::move(g), 1.0}; }

} // namespace

TEST_CASE("x-laws") {
  CHECK(XLaw::rademacher(1.5).variance() == doctest::Approx(2.25));
  CHECK(XLaw::two_point(0.25, 3.0, -1.0).variance() == doctest::Approx(3.0));
  CHECK_THROWS_AS(XLaw::two_point(0.5, 1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(XLaw::atomic({{1.0, 0.5}, {-1.0, 0.4}}), InvalidArgument);
  auto const sc = XLaw::semicircle(0.25);
  CHECK(sc.moment(4) == doctest::Approx(2 * 0.0625));
  CHECK(sc.moment(3) == 0.0);
  auto const u = XLaw::uniform(2.0);
  CHECK(u.variance() == doctest::Approx(4.0 / 3));
  CHECK(u.moment(4) == doctest::Approx(16.0 / 5));
}

TEST_CASE("g derived constants agree with differentiating |g|^2") {
  auto const g = GFunc::polynomial({1.0, {0.5, -0.3}, {0.25, 0.7}, {0.0, 0.1}});
  auto const& q = g.gsq();
  CHECK(g.d1() == doctest::Approx(q[1]));
  CHECK(g.d2() == doctest::Approx(2 * q[2]));
  for (double x : {-1.2, -0.3, 0.0, 0.4, 2.0}) CHECK(g.gsq_at(x) == doctest::Approx(std::norm(g(x))));
  auto const e = GFunc::exp();
  CHECK(e.d1() == 2.0);
  CHECK(e.d2() == 4.0);
  CHECK_THROWS_AS(GFunc::polynomial_real({2.0, 1.0}), InvalidArgument);
}

TEST_CASE("gsq moments") {
  auto const one = model(GFunc::constant_one(), XLaw::rademacher(1.0));
  for (double v : gsq_moments(one, 7, 6).values()) CHECK(v == 1.0);
  auto const lin = model(GFunc::polynomial_real({1, 1}), XLaw::rademacher(1.0));
  auto const m = gsq_moments(lin, 1, 2);
  CHECK(m(1) == doctest::Approx(2.0));
  CHECK(m(2) == doctest::Approx(8.0));
  auto const quad = model(GFunc::polynomial_real({1, 1, 0.5}), XLaw::rademacher(1.0));
  auto const g = [](double x) { return 1 + x + x * x / 2; };
  CHECK(gsq_moments(quad, 4, 1)(1) == doctest::Approx(0.5 * (std::pow(g(0.5), 2) + std::pow(g(-0.5), 2))));
  auto const ex = model(GFunc::exp(), XLaw::two_point(0.25, 0.9, -0.3));
  CHECK(gsq_moments(ex, 9, 3)(3) ==
        doctest::Approx(0.25 * std::exp(6 * 0.9 / 3) + 0.75 * std::exp(-6 * 0.3 / 3)));
  CHECK_THROWS_AS(gsq_moments(model(GFunc::exp(), XLaw::semicircle(1.0)), 4, 3), UnsupportedModelError);
  CHECK_THROWS_AS(gsq_moments(quad, 4, 17), SizeLimitError);
}

TEST_CASE("moments tend to 1 as n grows") {
  auto const quad = model(GFunc::polynomial_real({1, 1, 0.5}), XLaw::semicircle(1.0));
  auto const m = gsq_moments(quad, 1 << 20, 4);
  for (double v : m.values()) CHECK(std::abs(v - 1.0) < 1e-4);
}

TEST_CASE("Y_n cumulants") {
  auto const one = model(GFunc::constant_one(), XLaw::rademacher(1.0));
  auto const k = yn_cumulants(one, 16, 6);
  CHECK(k(1) == 1.0);
  for (int i = 2; i <= 6; ++i) CHECK(std::abs(k(i)) < 1e-14);

  auto const quad = model(GFunc::polynomial_real({1, 1, 0.5}), XLaw::rademacher(1.0));
  auto const single = moments_to_cumulants(gsq_moments(quad, 1, 4));
  for (int i = 1; i <= 4; ++i) CHECK(yn_cumulant(quad, 1, i) == doctest::Approx(single(i)));
  for (int n : {2, 5, 32}) {
    double const m1 = gsq_moments(quad, n, 1)(1);
    CHECK(yn_cumulant(quad, n, 1) == doctest::Approx(std::pow(m1, n)).epsilon(1e-13));
  }
  for (int n : {2, 3, 4, 6}) {
    auto const kap = moments_to_cumulants(gsq_moments(quad, n, 12 / n));
    for (int kk = 1; kk * n <= 12; ++kk)
      CHECK(std::abs(yn_cumulant(quad, n, kk) - product_cumulant(kk, kap, n)) <=
            1e-9 * std::abs(product_cumulant(kk, kap, n)));
  }
}

TEST_CASE("lemma B.2 expansion check") {
  std::vector<int> grid;
  for (int e = 4; e <= 10; ++e) grid.push_back(1 << e);
  auto const one = lemma_b2_expansion_check(model(GFunc::constant_one(), XLaw::rademacher(1.0)), grid);
  CHECK(one.k1_exact_zero);
  CHECK(one.passed());
  auto const lin = lemma_b2_expansion_check(model(GFunc::polynomial_real({1, 1}), XLaw::rademacher(1.0)), grid);
  CHECK(lin.k1_exact_zero);
  CHECK(lin.k2_exact_zero);
  for (auto const& r : lin.rows) CHECK(r.kappa1 == 1.0 + 1.0 / r.n);
  CHECK(lin.passed());
  auto const quad = lemma_b2_expansion_check(model(GFunc::polynomial_real({1, 1, 0.5}), XLaw::rademacher(1.0)), grid);
  CHECK(quad.exponent2 >= 1.4);
  CHECK(quad.exponent1 >= 1.4);
  CHECK(quad.passed());
  // Residuals for this model are 1/(4n^2) and 4/n^2 up to higher order.
  auto const& last = quad.rows.back();
  CHECK(last.resid1 * last.n * last.n == doctest::Approx(0.25).epsilon(0.05));
  CHECK(last.resid2 * last.n * last.n == doctest::Approx(4.0).epsilon(0.05));
  CHECK_THROWS_AS(lemma_b2_expansion_check(model(GFunc::exp(), XLaw::rademacher(1.0)), grid), UnsupportedModelError);
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "gapmeans/error.hpp"
#include "gapmeans/numeric.hpp"
#include "gapmeans/weights.hpp"

using namespace gapmeans;

TEST_CASE("power weight closed form") {
  const LogWeight w = make_power_weight(1);
  CHECK(w.log_w(0.0) == doctest::Approx(0.0));
  CHECK(w.log_w(1 - std::ldexp(1.0, -10)) == doctest::Approx(10 * std::log(2.0)).epsilon(1e-14));
  for (double r : {0.1, 0.5, 0.9, 0.999})
    CHECK(w.log_w(r) == doctest::Approx(-std::log1p(-r)).epsilon(1e-13));
  CHECK_THROWS_AS(make_power_weight(-1), ParameterError);
  CHECK_THROWS_AS(make_power_weight(0), ParameterError);
}

TEST_CASE("power weight triple is log-convex") {
  const LogWeight w = make_power_weight(2);
  std::vector<CurvePoint> c;
  for (double r : {0.5, 0.7, 0.9}) c.push_back({r, w.log_w(r)});
  CHECK(check_log_convexity(c, 0).pass);
}

TEST_CASE("exp weight closed form") {
  CHECK(make_exp_weight(1, 1).log_w(0.0) == doctest::Approx(1));
  CHECK(make_exp_weight(1, 1).log_w(0.5) == doctest::Approx(2));
  CHECK(make_exp_weight(2, 0.5).log_w(0.75) == doctest::Approx(4));
}

TEST_CASE("log weight") {
  const LogWeight w = make_log_weight(3);
  CHECK(w.log_w(0.0) == doctest::Approx(0.0));
  for (double r : {0.3, 0.9, 0.9999})
    CHECK(w.log_w(r) == doctest::Approx(3 * std::log(1 - std::log1p(-r))).epsilon(1e-12));
}

TEST_CASE("constant weight and products") {
  CHECK(make_constant_weight(1).phi(-0.3) == 0);
  const LogWeight five = make_constant_weight(5);
  for (double r : {0.0, 0.4, 0.99}) CHECK(five.log_w(r) == doctest::Approx(std::log(5.0)));
  CHECK(weight_product(five, five).phi(-1) == doctest::Approx(2 * std::log(5.0)));
  CHECK(weight_product(make_constant_weight(2), make_constant_weight(3)).phi(-2) ==
        doctest::Approx(std::log(6.0)));

  const LogWeight p1 = make_power_weight(1), p2 = make_power_weight(2), p3 = make_power_weight(3);
  const LogWeight prod = weight_product(p1, p2);
  const LogWeight same = weight_product(p1, make_constant_weight(1));
  for (double r : {0.2, 0.8, 0.999}) {
    CHECK(prod.log_w(r) == doctest::Approx(p3.log_w(r)).epsilon(1e-13));
    CHECK(same.log_w(r) == p1.log_w(r));
  }
}

TEST_CASE("weight powers") {
  const LogWeight p2 = make_power_weight(2), p1 = make_power_weight(1);
  for (double r : {0.1, 0.7, 0.9999}) {
    CHECK(weight_power(p2, 1).log_w(r) == doctest::Approx(p2.log_w(r)));
    CHECK(weight_power(p2, 0.5).log_w(r) == doctest::Approx(p1.log_w(r)).epsilon(1e-13));
  }
  CHECK(weight_power(make_constant_weight(3), 2).log_w(0.5) == doctest::Approx(std::log(9.0)));
}

TEST_CASE("sampled weights") {
  SUBCASE("round trip of (1-r)^-1 on log-spaced radii") {
    std::vector<SamplePoint> s;
    for (int i = 0; i < 50; ++i) {
      const double r = std::exp(-4.0 * std::pow(0.8, i));
      s.push_back({r, -std::log1p(-r)});
    }
    const LogWeight w = weight_from_samples(s);
    for (const auto& p : s) CHECK(w.log_w(p.r) == doctest::Approx(p.log_w).epsilon(1e-6));
  }
  SUBCASE("decreasing data is rejected") {
    std::vector<SamplePoint> s{{0.1, 1.0}, {0.5, 0.5}, {0.9, 0.2}};
    CHECK_THROWS_AS(weight_from_samples(s), MonotonicityError);
  }
  SUBCASE("concave data is rejected") {
    // log w = -s^2 is increasing and concave in s
    std::vector<SamplePoint> s;
    for (double r : {0.05, 0.1, 0.2, 0.4, 0.6, 0.8}) s.push_back({r, -std::pow(std::log(r), 2)});
    CHECK_THROWS_AS(weight_from_samples(s), ConvexityError);
  }
  SUBCASE("too few samples") {
    CHECK_THROWS_AS(weight_from_samples({{0.1, 0}, {0.2, 1}}), InputError);
  }
}

TEST_CASE("log-convexity check") {
  std::vector<CurvePoint> affine, concave;
  for (double r : {0.1, 0.2, 0.4, 0.6, 0.9}) {
    affine.push_back({r, 2 * std::log(r) + 1});
    concave.push_back({r, -std::pow(std::log(r), 2)});
  }
  const auto a = check_log_convexity(affine, 1e-12);
  CHECK(a.pass);
  CHECK(std::abs(a.max_defect) < 1e-15);
  const auto c = check_log_convexity(concave, 1e-7);
  CHECK_FALSE(c.pass);
  CHECK(c.max_defect > 0);

  // M_2(1 + 2 z^3, r)^2 = 1 + 4 r^6
  std::vector<CurvePoint> m2;
  for (int i = 1; i < 20; ++i) {
    const double r = 0.05 * i;
    m2.push_back({r, 0.5 * std::log1p(4 * std::pow(r, 6))});
  }
  CHECK(check_log_convexity(m2, 1e-9).pass);

  CHECK_THROWS_AS(check_log_convexity({{0.1, 0}, {0.2, 0}}, 0), InputError);
  CHECK_THROWS_AS(check_log_convexity({{0.2, 0}, {0.1, 0}, {0.3, 0}}, 0), InputError);
}

TEST_CASE("phi is convex and non-decreasing for every family") {
  const std::vector<LogWeight> ws{make_power_weight(0.5), make_power_weight(5), make_exp_weight(1, 1),
                                  make_exp_weight(2, 0.5), make_log_weight(3), make_constant_weight(2)};
  for (const auto& w : ws) {
    double prev = w.phi(-20);
    for (int i = 1; i < 400; ++i) {
      const double s1 = -20.0 * std::pow(0.97, i - 1), s2 = -20.0 * std::pow(0.97, i),
                   s3 = -20.0 * std::pow(0.97, i + 1);
      const double p1 = w.phi(s1), p2 = w.phi(s2), p3 = w.phi(s3);
      CHECK(p2 >= prev - 1e-12 * std::max(1.0, std::abs(prev)));
      CHECK(convexity_defect(s1, p1, s2, p2, s3, p3) <= 1e-9 * std::max(1.0, std::abs(p3)));
      CHECK(std::isfinite(p2));
      prev = p2;
    }
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gapmeans/error.hpp"
#include "gapmeans/lacunary.hpp"
#include "gapmeans/weights.hpp"

using namespace gapmeans;

namespace {

GapSeries with_exponents(std::initializer_list<double> ns) {
  GapSeries gs;
  for (double n : ns) gs.terms.push_back({n, 0.0});
  return gs;
}

std::vector<double> grid_from(double r0, int j_max = 40) {
  std::vector<double> s;
  for (int j = 1; j <= j_max; ++j)
    if (dyadic_radius(j) >= r0) s.push_back(dyadic_log_radius(j));
  return s;
}

}  // namespace

TEST_CASE("constant weight gives a constant series") {
  const GapSeries gs = theorem1_series(make_constant_weight(3));
  CHECK(gs.terms.empty());
  CHECK(gs.log_const + gs.log_norm == doctest::Approx(std::log(3.0)));
  CHECK(gs.log_m2(std::log(0.7)) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("parity split and merge") {
  const GapSeries gs = with_exponents({2, 8, 32, 128});
  const auto [g1, g2] = split_even_odd(gs);
  REQUIRE(g1.terms.size() == 2);
  REQUIRE(g2.terms.size() == 2);
  CHECK(g1.terms[0].n == 2);
  CHECK(g1.terms[1].n == 32);
  CHECK(g2.terms[0].n == 8);
  CHECK(g2.terms[1].n == 128);
  const auto merged = merge_even_odd(g1, g2);
  REQUIRE(merged.size() == gs.terms.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    CHECK(merged[i].n == gs.terms[i].n);
    CHECK(merged[i].log_a == gs.terms[i].log_a);
  }
}

TEST_CASE("validation rejects malformed series") {
  CHECK_THROWS_AS(validate(with_exponents({4, 2})), InputError);
  CHECK_THROWS_AS(validate(with_exponents({2, 2})), InputError);
  GapSeries bad = with_exponents({1, 2});
  bad.terms[1].log_a = kInf;
  CHECK_THROWS_AS(validate(bad), InputError);
  CHECK_NOTHROW(validate(with_exponents({1, 3, 9})));
}

TEST_CASE("dominance margins") {
  GapSeries one = with_exponents({5});
  one.log_const = kNegInf;
  const auto c1 = certify_dominance(one, {-1.0, -0.01});
  for (double m : c1.margin) CHECK(m == kInf);

  // equal coefficients: the margin closes as r -> 1
  GapSeries two = with_exponents({1, 2});
  two.log_const = kNegInf;
  const auto c2 = certify_dominance(two, {-1.0, -1e-3, -1e-6});
  CHECK(c2.margin[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c2.margin[2] < 2e-6);
  CHECK(c2.margin[2] >= 0);
}

TEST_CASE("(1-r)^-1: upper sum and M_2 ratio on the dyadic grid") {
  const LogWeight w = make_power_weight(1);
  const GapSeries gs = theorem1_series(w);
  REQUIRE(gs.terms.size() > 5);
  double upper = kNegInf, lo = kInf, hi = kNegInf;
  for (int j = 1; j <= 40; ++j) {
    const double s = dyadic_log_radius(j);
    if (std::exp(s) < gs.r0_certified) continue;
    upper = std::max(upper, gs.log_sum(s) - w.phi(s));
    const double m2 = gs.log_m2(s) - w.phi(s);
    lo = std::min(lo, m2);
    hi = std::max(hi, m2);
  }
  CHECK(upper <= std::log(20.0));
  CHECK(lo >= -std::log(30.0));
  CHECK(hi <= std::log(30.0));
}

TEST_CASE("term-wise minorant for every family") {
  const std::vector<LogWeight> ws{make_power_weight(0.5), make_power_weight(1), make_power_weight(2),
                                  make_power_weight(5),   make_exp_weight(2, 0.5), make_log_weight(3)};
  for (const auto& w : ws) {
    const GapSeries gs = theorem1_series(w);
    double worst = kNegInf;
    for (const double s : certification_grid(gs)) {
      const double phi = w.phi(s);
      for (const auto& t : gs.terms) {
        const double slack = 16 * 2.2e-16 * (std::abs(t.log_a) + std::abs(t.n * s) + std::abs(phi));
        worst = std::max(worst, t.log_a + t.n * s - phi - slack);
      }
    }
    CHECK_MESSAGE(worst <= 1e-9, w.describe());
  }
}

TEST_CASE("exp weight: exponents grow to the far end of the grid") {
  const LogWeight w = make_exp_weight(1, 1);
  const GapSeries gs = theorem1_series(w);
  REQUIRE(!gs.terms.empty());
  CHECK(gs.terms.back().n >= std::ldexp(1.0, 30));
  for (std::size_t k = 1; k < gs.terms.size(); ++k) CHECK(gs.terms[k].n > gs.terms[k - 1].n);
  double lo = kInf, hi = kNegInf;
  for (double s : grid_from(gs.r0_certified)) {
    const double m2 = gs.log_m2(s) - w.phi(s);
    lo = std::min(lo, m2);
    hi = std::max(hi, m2);
  }
  CHECK(std::isfinite(lo));
  CHECK(std::isfinite(hi));
  CHECK(hi - lo < 5.0);
}

TEST_CASE("parity dominance of certified series") {
  for (const auto& w : {make_power_weight(1), make_power_weight(2), make_exp_weight(2, 0.5)}) {
    const GapSeries gs = theorem1_series(w);
    const ParityCert cert = certify_parity(gs, grid_from(gs.r0_certified));
    CHECK_MESSAGE(cert.dominance.theta_min >= std::log(2.0), w.describe());
    for (std::size_t i = 0; i < cert.log_lower.size(); ++i) {
      const double s = cert.dominance.s[i];
      const double total = gs.log_sum(s);
      CHECK(cert.log_lower[i] <= total + 1e-12 * std::max(1.0, std::abs(total)));
    }
  }
}

TEST_CASE("series evaluation is stable in the log domain") {
  const GapSeries gs = theorem1_series(make_exp_weight(1, 1));
  const double s = dyadic_log_radius(40);
  CHECK(std::isfinite(gs.log_sum(s)));
  CHECK(std::isfinite(gs.log_m2(s)));
  CHECK(gs.log_m2(s) <= gs.log_sum(s) + 1e-12);
}

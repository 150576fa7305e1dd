#include <doctest.h>

#include <cmath>

#include "gapmeans/error.hpp"
#include "gapmeans/lacunary.hpp"
#include "gapmeans/means.hpp"
#include "gapmeans/verify.hpp"

using namespace gapmeans;

namespace {

// 1 + 2 z^3
GapSeries cubic() {
  GapSeries gs;
  gs.terms = {{3, std::log(2.0)}};
  return gs;
}

GapSeries constant(double A) {
  GapSeries gs;
  gs.log_const = std::log(A);
  return gs;
}

GapSeries one_plus_z() {
  GapSeries gs;
  gs.terms = {{1, 0.0}};
  return gs;
}

}  // namespace

TEST_CASE("m2_exact") {
  CHECK(std::exp(m2_exact(cubic(), 0.5)) == doctest::Approx(std::sqrt(1.0625)).epsilon(1e-15));
  CHECK(std::exp(m2_exact(cubic(), 0.5)) == doctest::Approx(1.0307764064).epsilon(1e-10));
  CHECK(m2_exact(constant(4), 0.9) == doctest::Approx(std::log(4.0)));
  CHECK(m2_exact(cubic(), 0.0) == doctest::Approx(0.0));
}

TEST_CASE("sampled means against quadrature oracles") {
  const GapSeries f = cubic();
  CHECK(std::exp(mp_sampled(f, kInf, 0.5)) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(std::abs(mp_sampled(f, 2, 0.5) - m2_exact(f, 0.5)) <= 1e-10 * std::abs(m2_exact(f, 0.5)) + 1e-15);
  // adaptive Gauss-Kronrod in 25-digit arithmetic
  CHECK(std::exp(mp_sampled(f, 0.5, 0.5)) == doctest::Approx(1.0078982037023074).epsilon(1e-10));
  CHECK(std::exp(mp_sampled(f, 1, 0.5)) == doctest::Approx(1.0156870128527515).epsilon(1e-10));
  CHECK(std::exp(mp_sampled(f, 4, 0.5)) == doctest::Approx(1.0581963684487191).epsilon(1e-10));
  CHECK(std::exp(mp_sampled(f, 1, 0.9)) == doctest::Approx(1.6352455426387889).epsilon(1e-8));
  for (double p : {0.5, 1.0, 3.0, kInf})
    CHECK(mp_sampled(constant(7), p, 0.8) == doctest::Approx(std::log(7.0)));
}

TEST_CASE("sup-norm bounds") {
  GapSeries mono;
  mono.log_const = kNegInf;
  mono.terms = {{4, 1.5}};
  const IntervalValue b = minf_bounds(mono, 0.6);
  CHECK(b.log_lo == doctest::Approx(1.5 + 4 * std::log(0.6)));
  CHECK(b.log_hi == doctest::Approx(1.5 + 4 * std::log(0.6)));

  const IntervalValue c = minf_bounds(cubic(), 0.5);
  CHECK(c.log_hi == doctest::Approx(std::log(1.25)));
  CHECK(c.log_lo <= mp_sampled(cubic(), kInf, 0.5) + 1e-15);

  const GapSeries gs = theorem1_series(make_power_weight(1));
  const IntervalValue far = minf_bounds(gs, dyadic_radius(35));
  CHECK(far.log_hi - far.log_lo <= std::log(4.0));
}

TEST_CASE("Holder lower bound") {
  CHECK(mp_lower_bound_holder(0.3, 0.3, 1.0) == doctest::Approx(0.3));
  CHECK(mp_lower_bound_holder(0.2, 0.9, 2.0 - 1e-12) == doctest::Approx(0.2).epsilon(1e-9));
  const double m2 = m2_exact(cubic(), 0.5);
  const double bound = mp_lower_bound_holder(m2, std::log(1.25), 1.0);
  CHECK(bound <= mp_sampled(cubic(), 1, 0.5));
  const IntervalValue br = mp_bounds(cubic(), 1, 0.5);
  CHECK(br.log_lo <= mp_sampled(cubic(), 1, 0.5));
  CHECK(br.log_hi >= mp_sampled(cubic(), 1, 0.5));
}

TEST_CASE("measure concentration") {
  CHECK(measure_concentration_check(constant(2), make_constant_weight(2), 0.7, 1024) == 1.0);
  // |1 + 0.25 e^{3 i t}| >= 0.75 > 1.25 / 2 everywhere
  const GapSeries f = cubic();
  const LogWeight w = make_constant_weight(1.25);
  CHECK(measure_concentration_check(f, w, 0.5, 4096) == 1.0);
}

TEST_CASE("volume means") {
  for (double q : {0.5, 2.0, 3.0})
    for (int d : {1, 2})
      CHECK(volume_mean(constant(1), q, 0.9, d) == doctest::Approx(0.0).epsilon(1e-12));
  // V_2^2 = 1 + r^6 for 1 + 2 z^3, d = 1
  CHECK(std::exp(2 * volume_mean(cubic(), 2, 0.5, 1)) == doctest::Approx(1.015625).epsilon(1e-12));
  CHECK(volume_mean(cubic(), 2, 1e-4, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(volume_mean(cubic(), 2, 0.0, 1) == 0.0);
  // nested adaptive quadrature in 25-digit arithmetic
  CHECK(std::exp(volume_mean(one_plus_z(), 1, 0.7, 1)) == doctest::Approx(1.0626376690869693).epsilon(1e-7));
  CHECK(std::exp(volume_mean(cubic(), 0.7, 0.8, 1)) == doctest::Approx(1.0503074463773111).epsilon(1e-7));
  CHECK(std::exp(volume_mean(cubic(), 3, 0.6, 1)) == doctest::Approx(1.0340533004643293).epsilon(1e-7));
}

TEST_CASE("weighted volume means") {
  // u = 1: same as V_q
  CHECK(weighted_volume_mean(cubic(), 1.5, RadialDensity::unit(), 0.7, 1) ==
        doctest::Approx(volume_mean(cubic(), 1.5, 0.7, 1)));
  // r = 0: |f(0)| u(0)^(1/q)
  const RadialDensity four = RadialDensity::from_weight(make_constant_weight(4));
  CHECK(std::exp(weighted_volume_mean(constant(3), 2, four, 0.0, 1)) == doctest::Approx(6.0));
  // u = 1 - t, f = 1, q = 1: (2/r^2) int_0^r t (1 - t) dt = 1 - 2r/3
  const RadialDensity inv = RadialDensity::reciprocal(make_power_weight(1));
  for (double r : {0.3, 0.6, 0.9})
    CHECK(std::exp(weighted_volume_mean(constant(1), 1, inv, r, 1)) == doctest::Approx(1 - 2 * r / 3).epsilon(1e-10));
  // alpha -> 0 approaches V_q
  const double v = volume_mean(cubic(), 1, 0.8, 1);
  CHECK(weighted_volume_mean(cubic(), 1, RadialDensity::one_minus_t2_pow(1e-9), 0.8, 1) ==
        doctest::Approx(v).epsilon(1e-8));
}

TEST_CASE("volume bounds bracket the volume mean") {
  const GapSeries gs = theorem1_series(make_power_weight(1));
  for (double r : {0.5, 0.9, 0.99}) {
    const IntervalValue b = weighted_volume_bounds(gs, 1, RadialDensity::unit(), r, 1);
    const double v = volume_mean(gs, 1, r, 1);
    CHECK(b.log_lo <= v + 1e-8);
    CHECK(b.log_hi >= v - 1e-8);
  }
}

TEST_CASE("smoothing transforms") {
  const LogCoefficients m2 = m2_squared_coefficients(cubic());
  REQUIRE(m2.size() == 2);
  CHECK(m2[0].first == 0);
  CHECK(m2[0].second == doctest::Approx(0.0));
  CHECK(m2[1].first == 6);
  CHECK(m2[1].second == doctest::Approx(std::log(4.0)));

  const LogCoefficients v = volume_smoothing_transform(m2, 1);
  CHECK(v[0].second == doctest::Approx(0.0));
  CHECK(v[1].second == doctest::Approx(0.0).epsilon(1e-15));
  for (double r : {0.2, 0.5, 0.9})
    CHECK(std::abs(log_power_series(v, r) - 2 * volume_mean(cubic(), 2, r, 1)) < 1e-9);

  const LogCoefficients k0{{0, 0.0}};
  CHECK(inverse_smoothing_transform(k0, 1)[0].second == doctest::Approx(std::log(2.0)));
  CHECK(volume_smoothing_transform(k0, 3)[0].second == doctest::Approx(0.0));
  CHECK(std::exp(inverse_smoothing_transform({{3, std::log(5.0)}}, 2)[0].second) == doctest::Approx(35.0));

  const LogCoefficients many{{0, 0.1}, {2, -0.4}, {7, 1.3}, {40, 2.0}};
  for (int d : {1, 2, 3}) {
    const auto round = volume_smoothing_transform(inverse_smoothing_transform(many, d), d);
    for (std::size_t i = 0; i < many.size(); ++i)
      CHECK(round[i].second == doctest::Approx(many[i].second + std::log(2.0 * d)).epsilon(1e-15));
    const auto fwd = volume_smoothing_transform({{1, 0.0}, {10, 0.0}, {100, 0.0}}, d);
    CHECK(fwd[0].second > fwd[1].second);
    CHECK(fwd[1].second > fwd[2].second);
  }
}

TEST_CASE("profiles") {
  const GapSeries gs = theorem1_series(make_power_weight(2));
  const auto radii = dyadic_grid(20, 1);
  const auto profiles = sphere_profiles(gs, {1.0, 2.0, kInf}, radii, ModePolicy::automatic);
  for (const auto& prof : profiles) {
    REQUIRE(prof.grid.size() == radii.size());
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
      const auto& pt = prof.grid[i];
      CHECK(pt.log_uncertainty >= 0);
      if (pt.mode == Mode::sampled) CHECK(pt.log_uncertainty <= 1e-6);
      CHECK(pt.bracket.log_lo <= pt.log_value);
      CHECK(pt.bracket.log_hi >= pt.log_value);
      if (i > 0 && pt.mode != Mode::bounds && prof.grid[i - 1].mode != Mode::bounds)
        CHECK(pt.log_value >= prof.grid[i - 1].log_value - 1e-9);
    }
  }
  CHECK(profiles[1].grid.back().mode == Mode::exact);
  CHECK(profiles[2].grid.back().mode == Mode::exact);
  CHECK(profiles[0].grid.back().mode == Mode::bounds);

  CHECK_THROWS_AS(sphere_profile(gs, 1.0, radii, ModePolicy::sampled_only), ResolutionError);
  const auto bounds = sphere_profile(gs, 1.0, radii, ModePolicy::bounds_only);
  for (const auto& pt : bounds.grid) CHECK(pt.mode != Mode::sampled);
}

TEST_CASE("volume profile entries") {
  const auto radii = dyadic_grid(10);
  const auto prof = volume_profile(cubic(), 0.7, 1, radii);
  CHECK(prof.grid.front().r == 0);
  CHECK(prof.grid.front().log_value == doctest::Approx(0.0));
  for (const auto& pt : prof.grid) {
    CHECK(pt.mode != Mode::bounds);
    if (pt.mode == Mode::sampled) CHECK(pt.log_uncertainty <= 1e-6);
  }
  std::vector<CurvePoint> positive;
  for (const auto& c : prof.curve())
    if (c.r > 0) positive.push_back(c);
  CHECK(check_log_convexity(positive, 1e-7).pass);
}

TEST_CASE("polar profile matches single-radius integrals") {
  auto integrand = [](double t) { return std::log1p(4 * std::pow(t, 6)); };
  const std::vector<double> radii{0.25, 0.5, 0.9, 0.999};
  const PolarProfile prof = polar_log_profile(integrand, radii, 2);
  REQUIRE(prof.resolved == radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    CHECK(prof.log_values[i] == doctest::Approx(polar_log_integral(integrand, radii[i], 2)).epsilon(1e-12));
  CHECK_THROWS_AS(polar_log_profile(integrand, {0.5, 0.4}, 1), InputError);
  CHECK_THROWS_AS(polar_log_integral(integrand, 1.0, 1), RangeError);
}

TEST_CASE("mode policy names") {
  CHECK(parse_mode_policy("auto") == ModePolicy::automatic);
  CHECK(parse_mode_policy("sampled") == ModePolicy::sampled_only);
  CHECK(parse_mode_policy("bounds") == ModePolicy::bounds_only);
  CHECK_THROWS_AS(parse_mode_policy("fast"), ParameterError);
}

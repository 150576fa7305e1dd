#include <doctest.h>

#include <cmath>

#include "gapmeans/error.hpp"
#include "gapmeans/multidim.hpp"
#include "gapmeans/parallel.hpp"

using namespace gapmeans;

namespace {

HomPoly monomial(int d, std::vector<int> alpha, Complex c = 1.0) {
  HomPoly p;
  p.dim = d;
  for (int a : alpha) p.degree += a;
  p.alphas = {std::move(alpha)};
  p.coeffs = {c};
  return p;
}

}  // namespace

TEST_CASE("multi-indices are homogeneous") {
  for (int d : {2, 3})
    for (int k : {1, 4, 9}) {
      const auto idx = multi_indices(d, k);
      const std::size_t expected = d == 2 ? k + 1 : (k + 1) * (k + 2) / 2;
      CHECK(idx.size() == expected);
      for (const auto& a : idx) {
        int total = 0;
        for (int x : a) total += x;
        CHECK(total == k);
      }
    }
}

TEST_CASE("sphere L2 norms of monomials") {
  CHECK(monomial_l2_squared({1, 0}) == doctest::Approx(0.5));
  for (int k : {1, 5, 30}) CHECK(monomial_l2_squared({k, 0}) == doctest::Approx(1.0 / (k + 1)));
  CHECK(monomial_l2_squared({1, 1, 1}) == doctest::Approx(2.0 / 120.0 * 1.0).epsilon(1e-12));
  HomPoly zero;
  zero.degree = 3;
  CHECK(l2_norm_sphere(zero) == 0);
}

TEST_CASE("L2 norm agrees with Monte Carlo") {
  const HomPoly z1 = monomial(2, {1, 0});
  const auto est = mc_inner_product(z1, z1, 100000, 7);
  CHECK(std::abs(est.value.real() - 0.5) <= 4 * est.std_error);
}

TEST_CASE("sup norms") {
  for (int k : {1, 10, 40}) CHECK(sup_norm_sphere(monomial(2, {k, 0})) >= 0.98);
  HomPoly lin;
  lin.dim = 2;
  lin.degree = 1;
  lin.alphas = {{1, 0}, {0, 1}};
  lin.coeffs = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  CHECK(sup_norm_sphere(lin) == doctest::Approx(1.0).epsilon(1e-6));
  const HomPoly p = random_rw_poly(2, 7, 3);
  CHECK(sup_norm_sphere(p.scaled(3.0)) == doctest::Approx(3 * sup_norm_sphere(p)).epsilon(1e-12));
}

TEST_CASE("random homogeneous polynomials") {
  const HomPoly a = random_rw_poly(2, 12, 5), b = random_rw_poly(2, 12, 5);
  REQUIRE(a.coeffs.size() == b.coeffs.size());
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) CHECK(a.coeffs[i] == b.coeffs[i]);
  for (const auto& alpha : a.alphas) CHECK(alpha[0] + alpha[1] == 12);

  const RWEntry lin = rw_entry(random_rw_poly(2, 1, 0));
  CHECK(lin.delta == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-6));

  CHECK_THROWS_AS(random_rw_poly(4, 3, 0), RangeError);
  CHECK_THROWS_AS(random_rw_poly(2, 0, 0), RangeError);
  CHECK_THROWS_AS(random_rw_poly(2, 129, 0), RangeError);
}

TEST_CASE("delta_k for small degrees stays away from zero") {
  for (std::uint64_t seed : {0u, 1u})
    for (int k : {2, 5, 16}) CHECK(rw_entry(random_rw_poly(2, k, seed)).delta >= 0.2);
}

TEST_CASE("ball series") {
  const BallSeries c = theorem1_series_ball(make_constant_weight(2), 2, 0);
  CHECK(c.terms.empty());
  CHECK(m2_exact_ball(c, 0.7) == doctest::Approx(std::log(2.0)));
  const MonteCarloMean m = mp_sphere_sampled(c, 1.5, 0.7, 10000);
  CHECK(m.log_value == doctest::Approx(std::log(2.0)));
  CHECK(m.std_error == doctest::Approx(0.0));

  const LogWeight w = make_power_weight(1);
  const BallSeries F = theorem1_series_ball(w, 2, 0);
  REQUIRE(!F.terms.empty());
  for (double r : {0.5, 0.9, 0.95}) {
    const MonteCarloMean mc = mp_sphere_sampled(F, 2, r, 100000, 0);
    const double exact = std::exp(2 * (m2_exact_ball(F, r) - mc.log_scale));
    CHECK(std::abs(mc.mean - exact) <= 3 * mc.mean_se);
  }
  // triangle inequality bound at sampled sphere points
  for (double r : {0.5, 0.9}) {
    const double bound = F.coefficient_series().log_sum(std::log(r));
    const MonteCarloMean sup = mp_sphere_sampled(F, kInf, r, 10000, 0);
    CHECK(sup.log_value <= bound + 1e-9);
  }
}

TEST_CASE("single-term ball series has M_2 = |W|_2 r^k") {
  BallSeries F;
  F.dim = 2;
  F.log_const = kNegInf;
  HomPoly p = random_rw_poly(2, 5, 11);
  F.terms = {{5, 0.0, p}};
  for (double r : {0.3, 0.8})
    CHECK(m2_exact_ball(F, r) == doctest::Approx(std::log(l2_norm_sphere(p)) + 5 * std::log(r)).epsilon(1e-12));
}

TEST_CASE("Monte Carlo is independent of the thread count") {
  const BallSeries F = theorem1_series_ball(make_power_weight(1), 2, 0);
  const unsigned saved = thread_count();
  set_thread_count(1);
  const MonteCarloMean a = mp_sphere_sampled(F, 1, 0.9, 20000, 3);
  set_thread_count(3);
  const MonteCarloMean b = mp_sphere_sampled(F, 1, 0.9, 20000, 3);
  set_thread_count(saved);
  CHECK(a.log_value == b.log_value);
  CHECK_THROWS_AS(mp_sphere_sampled(F, 1, 0.9, 100, 3), ParameterError);
}

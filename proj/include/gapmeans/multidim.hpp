#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "gapmeans/lacunary.hpp"
#include "gapmeans/weights.hpp"

namespace gapmeans {

using Complex = std::complex<double>;
using Point = std::vector<Complex>;

inline constexpr int kMaxBallDegree = 128;
inline constexpr std::size_t kDefaultSupBudget = 100'000;

// Homogeneous polynomial sum_alpha c_alpha z^alpha in d variables, |alpha| = degree.
struct HomPoly {
  int dim = 2;
  int degree = 0;
  std::vector<std::vector<int>> alphas;
  std::vector<Complex> coeffs;

  Complex eval(const Point& z) const;
  // value and holomorphic gradient (d/dz_i)
  Complex eval(const Point& z, Point& grad) const;
  HomPoly scaled(double factor) const;
};

// All multi-indices of length d and total degree k, lexicographically
// decreasing in the first coordinate.
std::vector<std::vector<int>> multi_indices(int d, int k);

// int_S |z^alpha|^2 dsigma = (d-1)! alpha! / (d-1+|alpha|)!
double monomial_l2_squared(const std::vector<int>& alpha);

HomPoly random_rw_poly(int d, int k, std::uint64_t seed);

double l2_norm_sphere(const HomPoly& poly);

// Uniform point on the unit sphere of C^d from 2d numbers in (0,1).
Point sphere_point(const double* u, int d);

// Maximum of |F| over quasi-random sphere points followed by projected
// gradient ascent from the best starts. Always a lower bound of the sup.
// grad may be null when only the value is needed
using SphereFunction = std::function<Complex(const Point& z, Point* grad)>;
double sup_search_sphere(const SphereFunction& f, int d,
                         std::size_t budget = kDefaultSupBudget);
double sup_norm_sphere(const HomPoly& poly, std::size_t budget = kDefaultSupBudget);

struct RWEntry {
  int k = 0;
  double sup_estimate = 1;
  double l2 = 0;
  double delta = 0;
};

struct RWCertificate {
  std::vector<RWEntry> entries;
  double delta_min() const;
};

RWEntry rw_entry(const HomPoly& poly, std::size_t budget = kDefaultSupBudget);

struct BallTerm {
  Exponent n = 0;
  double log_a = 0;
  HomPoly poly;  // W_n with sup norm ~1 on the sphere
};

// F(z) = exp(log_norm) (exp(log_const) + sum_k a_k W_{n_k}(z))
struct BallSeries {
  int dim = 2;
  double log_const = 0;
  std::vector<BallTerm> terms;
  double r0_certified = 0;
  double log_norm = 0;
  std::uint64_t seed = 0;
  RWCertificate certificate;

  Complex eval(const Point& z) const;
  Complex eval(const Point& z, Point& grad) const;
  // 1-variable shadow series with the same (n_k, a_k)
  GapSeries coefficient_series() const;
};

struct BallOptions {
  double r_max = 0.95;
  std::size_t sup_budget = kDefaultSupBudget;
};

BallSeries theorem1_series_ball(const LogWeight& w, int d, std::uint64_t seed,
                                const BallOptions& options = {});

// log M_2(F, r) = log_norm + 1/2 log(e^{2 log_const} + sum a_k^2 |W_k|_2^2 r^{2 n_k})
double m2_exact_ball(const BallSeries& F, double r);

struct MonteCarloMean {
  double log_value = 0;
  double std_error = 0;  // of the mean of |F|^p, relative, mapped to log M_p
  double mean = 0;       // sample mean of |F(r zeta)|^p / exp(p * log_scale)
  double mean_se = 0;
  double log_scale = 0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kShardSize = 4096;

// Uniform sphere samples from normalized complex Gaussian vectors; shard i
// uses its own generator seeded with (seed, i).
void for_each_sphere_sample(int d, std::size_t m, std::uint64_t seed,
                            const std::function<void(std::size_t, const Point&)>& body);

MonteCarloMean mp_sphere_sampled(const BallSeries& F, double p, double r,
                                 std::size_t m, std::uint64_t seed = 0);

struct InnerProductEstimate {
  Complex value;
  double std_error = 0;
};

// Monte Carlo estimate of int_S a conj(b) dsigma.
InnerProductEstimate mc_inner_product(const HomPoly& a, const HomPoly& b,
                                      std::size_t m, std::uint64_t seed = 0);

}  // namespace gapmeans

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace gapmeans {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// log(sum_i exp(x_i)). Terms are accumulated in descending order so the
// result does not depend on the input ordering. Returns -inf for an empty
// input or all -inf entries.
double logsumexp(std::span<const double> xs);

inline double logaddexp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// log(1 - exp(-x)) for x > 0, accurate for both small and large x.
inline double log1mexp(double x) {
  if (x <= 0.0) return kNegInf;
  return x < 0.6931471805599453 ? std::log(-std::expm1(-x))
                                : std::log1p(-std::exp(-x));
}

// log(1 - r) for r = exp(s), s < 0.
inline double log1m_exp_s(double s) { return std::log(-std::expm1(s)); }

// log of the radius grid point r_j = 1 - 2^-j, as s = log r.
inline double dyadic_log_radius(int j) {
  if (j == 0) return kNegInf;
  return std::log1p(-std::ldexp(1.0, -j));
}

inline double dyadic_radius(int j) { return 1.0 - std::ldexp(1.0, -j); }

// Convexity defect of the middle point of a triple in (x, y) coordinates:
// positive when y2 lies strictly above the chord.
inline double convexity_defect(double x1, double y1, double x2, double y2,
                               double x3, double y3) {
  const double chord = (y1 * (x3 - x2) + y3 * (x2 - x1)) / (x3 - x1);
  return y2 - chord;
}

// Indices of the lower convex hull of points sorted by strictly increasing x.
std::vector<std::size_t> lower_hull(std::span<const double> xs,
                                    std::span<const double> ys);

}  // namespace gapmeans

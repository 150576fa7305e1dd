#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gapmeans {

// Log-radius below which weights are not probed by searches. Every family
// stays finite (and is evaluated) for smaller s, including s = -inf.
inline constexpr double kDefaultLogRadiusFloor = -50.0;

// A log-convex weight w on [0,1) carried in log-log coordinates:
// phi(s) = log w(e^s), convex and non-decreasing on s < 0.
//
// Values are immutable; copies share the underlying function object.
class LogWeight {
 public:
  enum class Kind { power, exp, log, constant, sampled, product, power_of, series };
  using Params = std::map<std::string, double>;
  using Phi = std::function<double(double)>;

  LogWeight(Kind kind, Params params, Phi phi,
            double s_floor = kDefaultLogRadiusFloor);

  // phi(s) = log w(e^s); s = -inf gives log w(0).
  double phi(double s) const { return (*phi_)(s); }
  double log_w(double r) const;
  double operator()(double s) const { return phi(s); }

  Kind kind() const { return kind_; }
  const Params& params() const { return params_; }
  double s_floor() const { return s_floor_; }
  std::string describe() const;

 private:
  Kind kind_;
  Params params_;
  std::shared_ptr<const Phi> phi_;
  double s_floor_;
};

std::string to_string(LogWeight::Kind kind);

// w(r) = (1 - r)^(-alpha)
LogWeight make_power_weight(double alpha);
// w(r) = exp(c (1 - r)^(-beta))
LogWeight make_exp_weight(double c, double beta);
// w(r) = (log(e / (1 - r)))^gamma
LogWeight make_log_weight(double gamma);
LogWeight make_constant_weight(double A);

struct SamplePoint {
  double r;
  double log_w;
};

// Default hull-deviation tolerance, relative to max(1, |phi|).
inline constexpr double kSampleConvexTol = 1e-6;

// Piecewise-linear interpolant in (log r, log w). Constant to the left of the
// first sample, continued with the last slope to the right of the last one.
LogWeight weight_from_samples(std::vector<SamplePoint> samples,
                              double tol_convex = kSampleConvexTol);

LogWeight weight_product(const LogWeight& a, const LogWeight& b);
// w^q
LogWeight weight_power(const LogWeight& w, double q);

// Power series sum_k exp(log_b_k) r^k with non-negative exponents. Always
// log-convex and non-decreasing.
LogWeight weight_from_power_series(
    std::vector<std::pair<double, double>> exponent_log_coeff);

struct CurvePoint {
  double r;
  double log_value;
};

struct ConvexityReport {
  // Largest convexity defect over consecutive triples in (log r, log value),
  // divided by max(1, |log value|) of the triple.
  double max_defect = 0.0;
  std::size_t worst_index = 0;  // middle index of the worst triple
  bool pass = true;
};

ConvexityReport check_log_convexity(const std::vector<CurvePoint>& curve,
                                    double tol);

}  // namespace gapmeans

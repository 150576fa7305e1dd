#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gapmeans/lacunary.hpp"
#include "gapmeans/weights.hpp"

namespace gapmeans {

struct IntervalValue {
  double log_lo = 0;
  double log_hi = 0;

  double mid() const { return 0.5 * (log_lo + log_hi); }
  double half_width() const { return 0.5 * (log_hi - log_lo); }
};

enum class Mode { exact, sampled, bounds };
std::string to_string(Mode mode);

// Which evaluation paths a profile may use.
enum class ModePolicy { sampled_only, automatic, bounds_only };
std::string to_string(ModePolicy policy);
ModePolicy parse_mode_policy(const std::string& text);

// Radii beyond this are never sampled in automatic mode.
inline constexpr double kSampledRadiusLimit = 1.0 - 0x1p-14;
// Terms more than this many nats below the largest are dropped when sampling.
inline constexpr double kActiveWindow = 40.0;

struct ProfilePoint {
  double r = 0;
  double log_value = 0;
  Mode mode = Mode::exact;
  double log_uncertainty = 0;
  // bracket actually certified at this point; equals log_value +- uncertainty
  IntervalValue bracket;
};

struct MeansProfile {
  enum class Kind { sphere_p, volume_q, weighted_q };
  Kind kind = Kind::sphere_p;
  double p_or_q = 2;  // +inf for the sup mean
  int dim = 1;
  std::vector<ProfilePoint> grid;

  std::vector<CurvePoint> curve() const;
};

// ---- circle means (d = 1) ---------------------------------------------------

// log M_2(f, r) from the coefficients (Parseval).
double m2_exact(const GapSeries& gs, double r);

struct SamplingOptions {
  std::size_t samples = 0;  // 0 = smallest admissible power of two
  std::size_t sample_cap = std::size_t{1} << 23;
  // Compare against 2N samples and fail when they differ by more than tol.
  bool check_convergence = true;
  double rel_tol = 1e-8;
  // Minimum samples per unit of the largest active exponent.
  double oversampling = 8.0;
};

// Smallest circle sample count that resolves the active terms at r.
std::size_t circle_samples_required(const GapSeries& gs, double r);

// log |f(r e^{2 pi i m / N})| for m = 0..N-1, active terms only.
std::vector<double> circle_log_abs(const GapSeries& gs, double r, std::size_t n);

// log of the p-mean of exp(log_abs) (max for p = inf).
double log_power_mean(const std::vector<double>& log_abs, double p);

struct SampledMean {
  double log_value = 0;
  double log_uncertainty = 0;
  std::size_t samples = 0;
};

// Trapezoid p-means on N equispaced angles, one sample set for every p.
std::vector<SampledMean> mp_sampled_many(const GapSeries& gs,
                                         const std::vector<double>& ps, double r,
                                         const SamplingOptions& options = {});
double mp_sampled(const GapSeries& gs, double p, double r,
                  const SamplingOptions& options = {});

// Interval for log M_inf(f, r) that only uses coefficient moduli: the
// triangle inequality above, dominance and M_2 below.
IntervalValue minf_bounds(const GapSeries& gs, double r);
// Positive coefficients attain the maximum modulus at angle 0.
double minf_exact(const GapSeries& gs, double r);

// Hölder: M_2^2 <= M_inf^(2-p) M_p^p, so log M_p >= (2 m2 - (2-p) minf) / p.
double mp_lower_bound_holder(double log_m2, double log_minf_hi, double p);

// Bracket for log M_p from the exact M_2 and M_inf.
IntervalValue mp_bounds(const GapSeries& gs, double p, double r);

// Fraction of N circle samples with |f(r zeta)| >= w(r) / 2.
double measure_concentration_check(const GapSeries& gs, const LogWeight& w,
                                   double r, std::size_t n);

// ---- volume means -------------------------------------------------------------

// log u(t) for a positive continuous radial density on [0,1).
struct RadialDensity {
  std::function<double(double)> log_u;
  std::string name;

  static RadialDensity unit();
  static RadialDensity from_weight(const LogWeight& w);
  // u = 1 / v
  static RadialDensity reciprocal(const LogWeight& v);
  // u = (1 - t^2)^alpha
  static RadialDensity one_minus_t2_pow(double alpha);
};

inline constexpr double kVolumeTolerance = 1e-10;

// log of (2d / r^{2d}) int_0^r exp(log_integrand(t)) t^{2d-1} dt for r in
// (0,1), by adaptive Gauss-Kronrod on a partition refined toward t = r.
double polar_log_integral(const std::function<double(double)>& log_integrand,
                          double r, int d, double rel_tol = kVolumeTolerance);

struct PolarOptions {
  double rel_tol = kVolumeTolerance;
  unsigned max_depth = 8;
};

// |f|^q is only finitely smooth in t where zeros of f cross the circle, and
// the Kronrod error estimate then overstates the error by orders of
// magnitude; sampled integrands stop refining early unless their circle
// sample sets are small.
inline constexpr double kSampledVolumeTolerance = 1e-8;
inline constexpr unsigned kSampledVolumeDepth = 3;
inline constexpr unsigned kCheapSampledVolumeDepth = 7;
inline constexpr std::size_t kCheapCircleSamples = 4096;

struct PolarProfile {
  std::vector<double> log_values;  // NaN past `resolved`
  std::vector<double> rel_error;   // accumulated quadrature error estimate
  std::size_t resolved = 0;
};

// The same for strictly increasing radii, integrating each piece of a shared
// partition once. With allow_partial, a ResolutionError from the integrand
// stops the sweep and leaves the remaining radii unresolved.
PolarProfile polar_log_profile(const std::function<double(double)>& log_integrand,
                               const std::vector<double>& radii, int d,
                               const PolarOptions& options = {},
                               bool allow_partial = false);

// log M_q^q(f, t); exact for q = 2, sampled otherwise.
double log_sphere_q_power(const GapSeries& gs, double q, double t);

// log V_q(f, r), normalized volume measure on the ball of radius r in C^d.
double volume_mean(const GapSeries& gs, double q, double r, int d);
// log M_{q,u}(f, r) = log (r^{-2d} int_{rB} |f|^q u(|z|) dv)^{1/q}.
double weighted_volume_mean(const GapSeries& gs, double q, const RadialDensity& u,
                            double r, int d);
// Same integrals over bounds-mode sphere brackets.
IntervalValue weighted_volume_bounds(const GapSeries& gs, double q,
                                     const RadialDensity& u, double r, int d);

using LogCoefficients = std::vector<std::pair<double, double>>;  // (k, log a_k)

// log a_k -> log a_k + log(2d) - log(k + 2d)
LogCoefficients volume_smoothing_transform(const LogCoefficients& coeffs, int d);
// log a_k -> log a_k + log(k + 2d)
LogCoefficients inverse_smoothing_transform(const LogCoefficients& coeffs, int d);

// Coefficients of M_2^2(f, t) as a power series in t.
LogCoefficients m2_squared_coefficients(const GapSeries& gs);
// log sum_k a_k r^k
double log_power_series(const LogCoefficients& coeffs, double r);

// ---- profiles -----------------------------------------------------------------

std::vector<MeansProfile> sphere_profiles(const GapSeries& gs,
                                          const std::vector<double>& ps,
                                          const std::vector<double>& radii,
                                          ModePolicy policy);
MeansProfile sphere_profile(const GapSeries& gs, double p,
                            const std::vector<double>& radii, ModePolicy policy);
MeansProfile volume_profile(const GapSeries& gs, double q, int d,
                            const std::vector<double>& radii);
MeansProfile weighted_profile(const GapSeries& gs, double q, int d,
                              const RadialDensity& u,
                              const std::vector<double>& radii);

}  // namespace gapmeans

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapmeans/lacunary.hpp"
#include "gapmeans/means.hpp"
#include "gapmeans/weights.hpp"

namespace gapmeans {

// r_j = 1 - 2^-j for j = j_min..j_max
std::vector<double> dyadic_grid(int j_max, int j_min = 0);

struct EquivalenceEntry {
  double r = 0;
  double log_ratio = 0;  // log(mean / w), midpoint in bounds mode
  double log_ratio_lo = 0;
  double log_ratio_hi = 0;
  Mode mode = Mode::exact;
};

struct EquivalenceReport {
  std::string pipeline;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<EquivalenceEntry> grid;
  double log_C_lower = 0;
  double log_C_upper = 0;
  bool pass = false;

  double spread() const { return log_C_upper - log_C_lower; }
};

// log(profile / w) entry-wise; pass when every bracket is finite.
EquivalenceReport equivalence_report(const MeansProfile& profile, const LogWeight& w,
                                     std::string pipeline);

struct Theorem1Result {
  GapSeries series;
  std::vector<MeansProfile> profiles;  // one per p
  std::vector<EquivalenceReport> reports;
};

Theorem1Result theorem1_verify(const LogWeight& w, const std::vector<double>& ps,
                               const std::vector<double>& radii,
                               ModePolicy policy = ModePolicy::automatic,
                               const SynthesisOptions& options = {});
Theorem1Result theorem1_verify(const GapSeries& gs, const LogWeight& w,
                               const std::vector<double>& ps,
                               const std::vector<double>& radii,
                               ModePolicy policy = ModePolicy::automatic);

// Measured constants of the three coefficient properties and of the M_2
// identity, on the certification grid of the series.
struct LemmaCertificate {
  // max_k max_grid (log a_k + n_k s - phi(s)) beyond the floating-point
  // rounding of its operands; <= tolerance for a minorant
  double minorant_excess = kNegInf;
  bool minorant_pass = false;
  // log C1 = max_grid (log sum_k a_k r^{n_k} - phi), raw coefficients with constant
  double log_C1 = kNegInf;
  // log C2 from parity dominance on r >= r0_certified
  double log_C2_dominance = kInf;
  // log C2 from min over circle samples of |g1| + |g2| on j <= circle_j_max
  double log_C2_circle = kInf;
  // log C3 = min_grid (log M_2(f) - phi) of the normalized series
  double log_C3 = kInf;
  double theta_min = kInf;  // best parity margin, nats
  std::size_t grid_points = 0;
  bool pass = false;
};

inline constexpr double kMinorantTolerance = 1e-9;

LemmaCertificate lemma_certificate(const GapSeries& gs, const LogWeight& w,
                                   int j_max = 40, int circle_j_max = 14,
                                   std::size_t circle_points = 4096);

inline constexpr std::size_t kConcentrationSampleCap = std::size_t{1} << 23;

struct ConcentrationEntry {
  double r = 0;
  std::size_t samples = 0;  // 0 when the radius needs more than the cap
  double fraction = 0;
};

// |f| >= w/2 on a circle fraction of at least 1 / (2 C0^2), with C0 the
// largest measured M_inf / w on the grid. Radii whose active exponents need
// more than kConcentrationSampleCap samples are skipped and counted.
struct ConcentrationReport {
  double log_C0 = 0;
  double threshold = 0;
  std::vector<ConcentrationEntry> entries;
  std::size_t skipped = 0;
  bool pass = false;
};

ConcentrationReport concentration_report(const GapSeries& gs, const LogWeight& w,
                                         const std::vector<double>& radii,
                                         std::size_t min_samples = 4096);

// ---- equivalence classes of curves ---------------------------------------------

inline constexpr double kDefaultEnvelopeRatio = 10.0;

struct CorollaryMeansResult {
  bool equivalent = false;
  double log_envelope_ratio = 0;  // max log(curve / envelope)
  double worst_r = 0;
  std::vector<SamplePoint> envelope;  // largest non-decreasing log-convex minorant
  std::optional<EquivalenceReport> report;  // M_p of the synthesized f vs the raw curve
};

// Largest non-decreasing, log-log convex minorant of the curve at its own radii.
std::vector<SamplePoint> log_convex_minorant(const std::vector<SamplePoint>& curve);

CorollaryMeansResult corollary_means_verify(const std::vector<SamplePoint>& curve,
                                            double p,
                                            double max_ratio = kDefaultEnvelopeRatio);

// Log-convexity of M_p(f, .) on the grid points where the mean is computed
// (exact or sampled); bounds-mode radii are left out.
ConvexityReport hardy_check(const GapSeries& gs, double p,
                            const std::vector<double>& radii, double tol = 1e-7);

// ---- volume means pipelines ------------------------------------------------------

// |log error| of the polar identity on a finite coefficient list: the polar
// integral of sum (k+2d) a_k t^k against 2d sum a_k r^k.
double polar_identity_error(const LogCoefficients& coeffs, int d, double r);

struct PropositionResult {
  LogCoefficients wq_coefficients;   // sum A_k t^k ~ w^q
  LogCoefficients phi_q_coefficients;  // (k + 2d) A_k / (2d)
  GapSeries series;
  MeansProfile profile;
  EquivalenceReport report;
};

PropositionResult proposition_pipeline(const LogWeight& v, const LogWeight& w, double q,
                                       int d, const std::vector<double>& radii);

struct CorollaryVolumeResult {
  PropositionResult forward;
  MeansProfile volume;
  ConvexityReport convexity;
  // log V_q^q - log sum A_k r^k against the smoothed-coefficient series
  EquivalenceReport smoothed;
};

CorollaryVolumeResult corollary_volume_verify(const LogWeight& w, double q, int d,
                                              const std::vector<double>& radii);

struct AlphaDemo {
  MeansProfile profile;
  ConvexityReport convexity;
};

AlphaDemo alpha_weighted_demo(const GapSeries& gs, double p, double alpha, int d,
                              const std::vector<double>& radii);

}  // namespace gapmeans

#include "gapmeans/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "gapmeans/error.hpp"
#include "gapmeans/numeric.hpp"
#include "gapmeans/parallel.hpp"

namespace gapmeans {

std::vector<double> dyadic_grid(int j_max, int j_min) {
  if (j_min < 0 || j_max < j_min) throw ParameterError("grid needs 0 <= j_min <= j_max");
  std::vector<double> radii;
  for (int j = j_min; j <= j_max; ++j) radii.push_back(dyadic_radius(j));
  return radii;
}

EquivalenceReport equivalence_report(const MeansProfile& profile, const LogWeight& w,
                                     std::string pipeline) {
  EquivalenceReport rep;
  rep.pipeline = std::move(pipeline);
  rep.log_C_lower = kInf;
  rep.log_C_upper = kNegInf;
  bool finite = !profile.grid.empty();
  for (const auto& pt : profile.grid) {
    const double lw = w.log_w(pt.r);
    EquivalenceEntry e{pt.r, pt.log_value - lw, pt.bracket.log_lo - lw,
                       pt.bracket.log_hi - lw, pt.mode};
    finite = finite && std::isfinite(e.log_ratio_lo) && std::isfinite(e.log_ratio_hi);
    rep.log_C_lower = std::min(rep.log_C_lower, e.log_ratio_lo);
    rep.log_C_upper = std::max(rep.log_C_upper, e.log_ratio_hi);
    rep.grid.push_back(e);
  }
  rep.pass = finite;
  return rep;
}

namespace {

std::string format_p(double p) {
  if (p == kInf) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

// multiply every coefficient by exp(log_factor)
LogCoefficients scale_coefficients(LogCoefficients coeffs, double log_factor) {
  for (auto& c : coeffs) c.second += log_factor;
  return coeffs;
}

}  // namespace

Theorem1Result theorem1_verify(const GapSeries& gs, const LogWeight& w,
                               const std::vector<double>& ps,
                               const std::vector<double>& radii, ModePolicy policy) {
  Theorem1Result res;
  res.series = gs;
  res.profiles = sphere_profiles(gs, ps, radii, policy);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto rep = equivalence_report(res.profiles[i], w, "theorem1");
    rep.params = {{"weight", w.describe()}, {"p", format_p(ps[i])},
                  {"mode", to_string(policy)}};
    res.reports.push_back(std::move(rep));
  }
  return res;
}

Theorem1Result theorem1_verify(const LogWeight& w, const std::vector<double>& ps,
                               const std::vector<double>& radii, ModePolicy policy,
                               const SynthesisOptions& options) {
  return theorem1_verify(theorem1_series(w, options), w, ps, radii, policy);
}

LemmaCertificate lemma_certificate(const GapSeries& gs, const LogWeight& w, int j_max,
                                   int circle_j_max, std::size_t circle_points) {
  LemmaCertificate cert;
  GapSeries raw = gs;
  raw.log_norm = 0;
  const auto grid = certification_grid(gs, j_max);
  cert.grid_points = grid.size();

  for (double s : grid) {
    const double phi = w.phi(s);
    if (s != kNegInf) {
      const auto [first, last] = raw.window(s);
      for (std::size_t k = first; k < last; ++k) {
        const auto& t = raw.terms[k];
        // log a_k and n_k s nearly cancel close to r = 1; allow their rounding
        const double rounding = 16 * std::numeric_limits<double>::epsilon() *
                                (std::abs(t.log_a) + std::abs(t.n * s) + std::abs(phi));
        cert.minorant_excess = std::max(cert.minorant_excess, t.log_term(s) - phi - rounding);
      }
    }
    cert.log_C1 = std::max(cert.log_C1, raw.log_sum(s) - phi);
    cert.log_C3 = std::min(cert.log_C3, gs.log_m2(s) - phi);
  }
  cert.minorant_pass = cert.minorant_excess <= kMinorantTolerance;

  if (!gs.terms.empty()) {
    const double s0 = std::log(gs.r0_certified);
    std::vector<double> upper;
    for (double s : grid)
      if (s >= s0) upper.push_back(s);
    const ParityCert parity = certify_parity(raw, upper);
    for (std::size_t i = 0; i < upper.size(); ++i)
      cert.log_C2_dominance =
          std::min(cert.log_C2_dominance, parity.log_lower[i] - w.phi(upper[i]));
    cert.theta_min = parity.dominance.theta_min;

    GapSeries g1 = raw, g2 = raw;
    g1.log_const = g2.log_const = kNegInf;
    g1.terms.clear();
    g2.terms.clear();
    for (std::size_t k = 0; k < raw.terms.size(); ++k)
      (k % 2 == 0 ? g1 : g2).terms.push_back(raw.terms[k]);
    for (int j = 1; j <= circle_j_max; ++j) {
      const double r = dyadic_radius(j);
      if (r < gs.r0_certified) continue;
      const auto a = circle_log_abs(g1, r, circle_points);
      std::vector<double> b(circle_points, kNegInf);
      if (!g2.terms.empty()) b = circle_log_abs(g2, r, circle_points);
      const double phi = w.log_w(r);
      for (std::size_t m = 0; m < circle_points; ++m)
        cert.log_C2_circle = std::min(cert.log_C2_circle, logaddexp(a[m], b[m]) - phi);
    }
  }

  const bool c2_ok = gs.terms.empty() ||
                     (std::isfinite(cert.log_C2_dominance) && std::isfinite(cert.log_C2_circle));
  cert.pass = cert.minorant_pass && std::isfinite(cert.log_C1) &&
              std::isfinite(cert.log_C3) && c2_ok;
  return cert;
}

ConcentrationReport concentration_report(const GapSeries& gs, const LogWeight& w,
                                         const std::vector<double>& radii,
                                         std::size_t min_samples) {
  ConcentrationReport rep;
  rep.log_C0 = kNegInf;
  for (double r : radii) rep.log_C0 = std::max(rep.log_C0, minf_exact(gs, r) - w.log_w(r));
  rep.log_C0 = std::max(rep.log_C0, 0.0);
  rep.threshold = 0.5 * std::exp(-2.0 * rep.log_C0);
  rep.pass = !radii.empty();
  rep.entries.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    const std::size_t need = std::max(min_samples, circle_samples_required(gs, r));
    if (need > kConcentrationSampleCap) {
      rep.entries[i] = {r, 0, std::numeric_limits<double>::quiet_NaN()};
      ++rep.skipped;
      continue;
    }
    const std::size_t n = std::bit_ceil(need);
    rep.entries[i] = {r, n, measure_concentration_check(gs, w, r, n)};
    rep.pass = rep.pass && rep.entries[i].fraction >= rep.threshold;
  }
  return rep;
}

std::vector<SamplePoint> log_convex_minorant(const std::vector<SamplePoint>& curve) {
  if (curve.size() < 3) throw InputError("curve needs at least 3 points");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve[i].r > 0 && curve[i].r < 1)) throw InputError("curve radii must lie in (0,1)");
    if (i > 0 && !(curve[i].r > curve[i - 1].r))
      throw InputError("curve radii must be strictly increasing");
    if (!std::isfinite(curve[i].log_w)) throw InputError("curve values must be finite");
    xs.push_back(std::log(curve[i].r));
    ys.push_back(curve[i].log_w);
  }
  const auto hull = lower_hull(xs, ys);
  std::vector<SamplePoint> env(curve.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    while (seg + 2 < hull.size() && hull[seg + 1] <= i) ++seg;
    const std::size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
    double y = ys[a];
    if (b != a) y = ys[a] + (ys[b] - ys[a]) * (xs[i] - xs[a]) / (xs[b] - xs[a]);
    env[i] = {curve[i].r, std::min(y, ys[i])};
  }
  // flatten the decreasing part so the minorant is a weight
  const auto low = std::min_element(env.begin(), env.end(),
                                    [](const SamplePoint& a, const SamplePoint& b) {
                                      return a.log_w < b.log_w;
                                    });
  for (auto it = env.begin(); it != low; ++it) it->log_w = low->log_w;
  return env;
}

CorollaryMeansResult corollary_means_verify(const std::vector<SamplePoint>& curve,
                                            double p, double max_ratio) {
  if (!(max_ratio >= 1)) throw ParameterError("ratio threshold must be >= 1");
  CorollaryMeansResult res;
  res.envelope = log_convex_minorant(curve);
  res.log_envelope_ratio = 0;
  res.worst_r = curve.front().r;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double gap = curve[i].log_w - res.envelope[i].log_w;
    if (gap > res.log_envelope_ratio) {
      res.log_envelope_ratio = gap;
      res.worst_r = curve[i].r;
    }
  }
  res.equivalent = res.log_envelope_ratio <= std::log(max_ratio);
  if (!res.equivalent) return res;

  const LogWeight w = weight_from_samples(res.envelope);
  std::vector<double> radii;
  for (const auto& pt : curve) radii.push_back(pt.r);
  Theorem1Result t1 = theorem1_verify(w, {p}, radii);
  EquivalenceReport rep = t1.reports.front();
  rep.pipeline = "corollary_means";
  rep.params = {{"p", format_p(p)}, {"max_ratio", format_p(max_ratio)}};
  // rebase from the envelope to the raw curve
  rep.log_C_lower = kInf;
  rep.log_C_upper = kNegInf;
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    const double shift = curve[i].log_w - res.envelope[i].log_w;
    auto& e = rep.grid[i];
    e.log_ratio -= shift;
    e.log_ratio_lo -= shift;
    e.log_ratio_hi -= shift;
    rep.log_C_lower = std::min(rep.log_C_lower, e.log_ratio_lo);
    rep.log_C_upper = std::max(rep.log_C_upper, e.log_ratio_hi);
  }
  rep.pass = rep.pass && std::isfinite(rep.log_C_lower) && std::isfinite(rep.log_C_upper);
  res.report = std::move(rep);
  return res;
}

ConvexityReport hardy_check(const GapSeries& gs, double p, const std::vector<double>& radii,
                            double tol) {
  std::vector<double> positive;
  for (double r : radii)
    if (r > 0) positive.push_back(r);
  const MeansProfile prof = sphere_profile(gs, p, positive, ModePolicy::automatic);
  std::vector<CurvePoint> computed;
  for (const auto& pt : prof.grid)
    if (pt.mode != Mode::bounds) computed.push_back({pt.r, pt.log_value});
  return check_log_convexity(computed, tol);
}

double polar_identity_error(const LogCoefficients& coeffs, int d, double r) {
  const LogCoefficients b = inverse_smoothing_transform(coeffs, d);
  const double lhs =
      polar_log_integral([&](double t) { return log_power_series(b, t); }, r, d, 1e-12);
  const double rhs = std::log(2.0 * d) + log_power_series(coeffs, r);
  return std::abs(lhs - rhs);
}

PropositionResult proposition_pipeline(const LogWeight& v, const LogWeight& w, double q,
                                       int d, const std::vector<double>& radii) {
  if (!(q > 0) || q == kInf) throw ParameterError("q must be a positive real");
  if (d < 1) throw ParameterError("dimension must be >= 1");
  PropositionResult res;

  // sum A_k t^k = M_2^2 of a series equivalent to w^{q/2}
  const GapSeries half = theorem1_series(weight_power(w, 0.5 * q));
  res.wq_coefficients = m2_squared_coefficients(half);
  // (k + 2d) A_k / (2d): the polar integral then returns sum A_k r^k exactly
  res.phi_q_coefficients = scale_coefficients(
      inverse_smoothing_transform(res.wq_coefficients, d), -std::log(2.0 * d));

  const LogWeight phi_q = weight_from_power_series(res.phi_q_coefficients);
  const LogWeight target = weight_power(weight_product(phi_q, v), 1.0 / q);
  res.series = theorem1_series(target);

  res.profile = weighted_profile(res.series, q, d, RadialDensity::reciprocal(v), radii);
  res.report = equivalence_report(res.profile, w, "proposition");
  res.report.params = {{"v", v.describe()}, {"w", w.describe()},
                       {"q", format_p(q)}, {"d", std::to_string(d)}};
  return res;
}

CorollaryVolumeResult corollary_volume_verify(const LogWeight& w, double q, int d,
                                              const std::vector<double>& radii) {
  CorollaryVolumeResult res;
  res.forward = proposition_pipeline(make_constant_weight(1.0), w, q, d, radii);
  res.forward.report.pipeline = "corollary_volume";
  res.volume = res.forward.profile;
  res.volume.kind = MeansProfile::Kind::volume_q;

  std::vector<CurvePoint> positive;
  for (const auto& pt : res.volume.curve())
    if (pt.r > 0) positive.push_back(pt);
  res.convexity = check_log_convexity(positive, 1e-7);

  const LogCoefficients smoothed =
      volume_smoothing_transform(res.forward.phi_q_coefficients, d);
  EquivalenceReport& rep = res.smoothed;
  rep.pipeline = "corollary_volume_smoothed";
  rep.params = {{"w", w.describe()}, {"q", format_p(q)}, {"d", std::to_string(d)}};
  rep.log_C_lower = kInf;
  rep.log_C_upper = kNegInf;
  bool finite = true;
  for (const auto& pt : res.volume.grid) {
    const double ref = log_power_series(smoothed, pt.r);
    EquivalenceEntry e{pt.r, q * pt.log_value - ref, q * pt.bracket.log_lo - ref,
                       q * pt.bracket.log_hi - ref, pt.mode};
    finite = finite && std::isfinite(e.log_ratio_lo) && std::isfinite(e.log_ratio_hi);
    rep.log_C_lower = std::min(rep.log_C_lower, e.log_ratio_lo);
    rep.log_C_upper = std::max(rep.log_C_upper, e.log_ratio_hi);
    rep.grid.push_back(e);
  }
  rep.pass = finite && !rep.grid.empty();
  return res;
}

AlphaDemo alpha_weighted_demo(const GapSeries& gs, double p, double alpha, int d,
                              const std::vector<double>& radii) {
  if (!(alpha > 0)) throw ParameterError("alpha must be positive");
  AlphaDemo demo;
  demo.profile = weighted_profile(gs, p, d, RadialDensity::one_minus_t2_pow(alpha), radii);
  std::vector<CurvePoint> positive;
  for (const auto& pt : demo.profile.curve())
    if (pt.r > 0) positive.push_back(pt);
  demo.convexity = check_log_convexity(positive, 1e-7);
  return demo;
}

}  // namespace gapmeans

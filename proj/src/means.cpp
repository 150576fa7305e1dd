#include "gapmeans/means.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <limits>

#include "gapmeans/error.hpp"
#include "gapmeans/numeric.hpp"
#include "gapmeans/parallel.hpp"

namespace gapmeans {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::exact: return "exact";
    case Mode::sampled: return "sampled";
    case Mode::bounds: return "bounds";
  }
  return "unknown";
}

std::string to_string(ModePolicy policy) {
  switch (policy) {
    case ModePolicy::sampled_only: return "sampled";
    case ModePolicy::automatic: return "auto";
    case ModePolicy::bounds_only: return "bounds";
  }
  return "unknown";
}

ModePolicy parse_mode_policy(const std::string& text) {
  if (text == "sampled") return ModePolicy::sampled_only;
  if (text == "auto") return ModePolicy::automatic;
  if (text == "bounds") return ModePolicy::bounds_only;
  throw ParameterError("mode must be one of sampled, auto, bounds: " + text);
}

std::vector<CurvePoint> MeansProfile::curve() const {
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (const auto& pt : grid) out.push_back({pt.r, pt.log_value});
  return out;
}

namespace {

double log_radius(double r) {
  if (!(r >= 0 && r < 1)) throw RangeError("radius must lie in [0, 1)");
  return r == 0 ? kNegInf : std::log(r);
}

void require_dim1(const GapSeries& gs) {
  if (gs.dim != 1) throw InputError("circle means need a one-variable series");
}

void require_positive_exponent(double p) {
  if (!(p > 0)) throw ParameterError("mean exponent must be positive");
}

struct ActiveTerms {
  double top = kNegInf;   // log of the largest term, normalization included
  double tail = kNegInf;  // log bound on the dropped terms
  Exponent n_act = 0;
  std::vector<Exponent> n;
  std::vector<double> log_c;  // relative to top
};

ActiveTerms active_terms(const GapSeries& gs, double s) {
  ActiveTerms act;
  const auto [first, last] = gs.window(s);
  if (gs.has_constant()) act.top = gs.log_const;
  for (std::size_t k = first; k < last; ++k)
    act.top = std::max(act.top, gs.terms[k].log_term(s));
  if (act.top == kNegInf) return act;

  const double cutoff = act.top - kActiveWindow;
  if (gs.has_constant() && gs.log_const >= cutoff) {
    act.n.push_back(0);
    act.log_c.push_back(gs.log_const - act.top);
  }
  std::size_t dropped = 0;
  for (std::size_t k = first; k < last; ++k) {
    const double lt = gs.terms[k].log_term(s);
    if (lt >= cutoff) {
      act.n.push_back(gs.terms[k].n);
      act.log_c.push_back(lt - act.top);
      act.n_act = gs.terms[k].n;
    } else {
      ++dropped;
    }
  }
  // terms outside the evaluation window sit below top - kEvalWindow
  dropped += gs.terms.size() - (last - first);
  if (gs.has_constant() && gs.log_const < cutoff) ++dropped;
  if (dropped > 0) act.tail = cutoff + std::log(static_cast<double>(dropped));
  act.top += gs.log_norm;
  if (act.tail != kNegInf) act.tail += gs.log_norm;
  return act;
}

std::vector<double> sample_active(const ActiveTerms& act, std::size_t n) {
  std::vector<double> out(n, act.top);
  if (act.n.size() <= 1) return out;

  std::vector<std::uint64_t> step(act.n.size());
  std::vector<double> coeff(act.n.size());
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < act.n.size(); ++k) {
    step[k] = static_cast<std::uint64_t>(std::fmod(act.n[k], nd));
    coeff[k] = std::exp(act.log_c[k]);
  }
  auto unit = [&](std::uint64_t m) { return std::polar(1.0, 2.0 * kPi * static_cast<double>(m % n) / nd); };

  // each chunk restarts every term from an exactly reduced phase and rotates
  // it sample by sample
  constexpr std::size_t chunk = 4096;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t len = std::min(n, begin + chunk) - begin;
    std::vector<double> re(len, 0.0), im(len, 0.0);
    for (std::size_t k = 0; k < step.size(); ++k) {
      const std::complex<double> rot = unit(step[k]);
      std::complex<double> z = coeff[k] * unit(step[k] * begin);
      for (std::size_t m = 0; m < len; ++m) {
        re[m] += z.real();
        im[m] += z.imag();
        z = {z.real() * rot.real() - z.imag() * rot.imag(),
             z.real() * rot.imag() + z.imag() * rot.real()};
      }
    }
    for (std::size_t m = 0; m < len; ++m)
      out[begin + m] = act.top + 0.5 * std::log(re[m] * re[m] + im[m] * im[m]);
  });
  return out;
}

// saturates instead of overflowing for exponents near the cap
std::size_t required_samples(Exponent n_act, double oversampling) {
  const double need = std::ceil(oversampling * n_act);
  if (need >= 0x1p62) return std::size_t{1} << 62;
  return static_cast<std::size_t>(need);
}

}  // namespace

std::size_t circle_samples_required(const GapSeries& gs, double r) {
  require_dim1(gs);
  return required_samples(active_terms(gs, log_radius(r)).n_act, SamplingOptions{}.oversampling);
}

double m2_exact(const GapSeries& gs, double r) {
  require_dim1(gs);
  return gs.log_m2(log_radius(r));
}

double minf_exact(const GapSeries& gs, double r) {
  require_dim1(gs);
  return gs.log_sum(log_radius(r));
}

std::vector<double> circle_log_abs(const GapSeries& gs, double r, std::size_t n) {
  require_dim1(gs);
  if (n == 0) throw ParameterError("sample count must be positive");
  return sample_active(active_terms(gs, log_radius(r)), n);
}

namespace {

// p-mean over every stride-th sample
double strided_power_mean(const std::vector<double>& log_abs, double p, std::size_t stride) {
  double top = kNegInf;
  for (std::size_t m = 0; m < log_abs.size(); m += stride) top = std::max(top, log_abs[m]);
  if (p == kInf || top == kNegInf) return top;
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t m = 0; m < log_abs.size(); m += stride, ++count)
    sum += std::exp(p * (log_abs[m] - top));
  return top + std::log(sum / static_cast<double>(count)) / p;
}

}  // namespace

double log_power_mean(const std::vector<double>& log_abs, double p) {
  if (log_abs.empty()) throw InputError("no samples");
  return strided_power_mean(log_abs, p, 1);
}

std::vector<SampledMean> mp_sampled_many(const GapSeries& gs,
                                         const std::vector<double>& ps, double r,
                                         const SamplingOptions& options) {
  require_dim1(gs);
  for (double p : ps) require_positive_exponent(p);
  const ActiveTerms act = active_terms(gs, log_radius(r));
  const std::size_t need = required_samples(act.n_act, options.oversampling);

  const bool automatic = options.samples == 0;
  std::size_t n = automatic ? std::bit_ceil(std::max<std::size_t>(1024, need)) : options.samples;
  if (n < need || n > options.sample_cap)
    throw ResolutionError("circle sampling cannot resolve exponent " +
                          std::to_string(act.n_act) + " with at most " +
                          std::to_string(options.sample_cap) +
                          " samples; use bounds mode");

  std::vector<double> values(ps.size()), diffs(ps.size(), 0.0);
  if (!options.check_convergence) {
    const auto samples = sample_active(act, n);
    for (std::size_t i = 0; i < ps.size(); ++i) values[i] = log_power_mean(samples, ps[i]);
  } else {
    // The even-indexed half of 2N samples is the N-point rule. Zeros of f on
    // the circle make |f|^p non-smooth, so automatic mode keeps doubling.
    while (true) {
      const auto fine = sample_active(act, 2 * n);
      bool converged = true;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        values[i] = strided_power_mean(fine, ps[i], 1);
        diffs[i] = std::abs(strided_power_mean(fine, ps[i], 2) - values[i]);
        converged = converged && diffs[i] <= options.rel_tol;
      }
      if (converged) {
        n *= 2;
        break;
      }
      if (!automatic || 2 * n > options.sample_cap) {
        const double worst = *std::max_element(diffs.begin(), diffs.end());
        throw AccuracyError("sampled mean changed by " + std::to_string(worst) +
                            " when doubling " + std::to_string(n) + " samples");
      }
      n *= 2;
    }
  }

  std::vector<SampledMean> out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    SampledMean sm;
    sm.samples = n;
    sm.log_value = values[i];
    // the dropped tail moves |f| by at most exp(tail) at every angle
    const double tail_rel =
        act.tail == kNegInf ? 0.0 : std::exp(act.tail - sm.log_value);
    sm.log_uncertainty = diffs[i] + tail_rel;
    out.push_back(sm);
  }
  return out;
}

double mp_sampled(const GapSeries& gs, double p, double r,
                  const SamplingOptions& options) {
  return mp_sampled_many(gs, {p}, r, options).front().log_value;
}

IntervalValue minf_bounds(const GapSeries& gs, double r) {
  require_dim1(gs);
  const double s = log_radius(r);
  const auto logs = gs.term_logs(s);
  if (logs.empty()) return {kNegInf, kNegInf};

  // terms outside the evaluation window are each below top - kEvalWindow
  const auto [first, last] = gs.window(s);
  const std::size_t dropped = gs.terms.size() - (last - first);
  const std::size_t top_index =
      std::max_element(logs.begin(), logs.end()) - logs.begin();
  const double top = logs[top_index];
  double hi = logsumexp(logs);
  if (dropped > 0)
    hi = logaddexp(hi, top - kEvalWindow + std::log(static_cast<double>(dropped)));

  std::vector<double> rest;
  for (std::size_t i = 0; i < logs.size(); ++i)
    if (i != top_index) rest.push_back(logs[i]);
  double rest_log = logsumexp(rest);
  if (dropped > 0)
    rest_log = logaddexp(rest_log, top - kEvalWindow + std::log(static_cast<double>(dropped)));

  double lo = gs.log_m2(s);  // M_inf >= M_2 >= every single term
  if (rest_log == kNegInf)
    lo = top;
  else if (top > rest_log)
    lo = std::max(lo, top + log1mexp(top - rest_log));
  if (gs.has_constant()) lo = std::max(lo, gs.log_const + gs.log_norm);
  lo = std::min(lo, hi);
  return {lo, hi};
}

double mp_lower_bound_holder(double log_m2, double log_minf_hi, double p) {
  if (!(p > 0 && p < 2)) throw ParameterError("Hölder lower bound needs 0 < p < 2");
  if (log_m2 > log_minf_hi + 1e-12 * std::max(1.0, std::abs(log_minf_hi)))
    throw InputError("inconsistent inputs: M_2 exceeds the M_inf upper bound");
  if (log_m2 == log_minf_hi) return log_m2;
  return (2.0 * log_m2 - (2.0 - p) * log_minf_hi) / p;
}

IntervalValue mp_bounds(const GapSeries& gs, double p, double r) {
  require_positive_exponent(p);
  const double m2 = m2_exact(gs, r);
  if (p == 2) return {m2, m2};
  const IntervalValue minf = minf_bounds(gs, r);
  const double minf_hi = std::max(minf.log_hi, m2);
  if (p == kInf) return {std::max(minf.log_lo, m2), minf_hi};
  if (p > 2) return {m2, minf_hi};
  return {mp_lower_bound_holder(m2, minf_hi, p), m2};
}

double measure_concentration_check(const GapSeries& gs, const LogWeight& w,
                                   double r, std::size_t n) {
  require_dim1(gs);
  const ActiveTerms act = active_terms(gs, log_radius(r));
  if (n < required_samples(act.n_act, 8.0))
    throw ResolutionError("too few samples to resolve the active exponents; use bounds mode");
  const auto samples = sample_active(act, n);
  const double threshold = w.log_w(r) - std::log(2.0);
  std::size_t hits = 0;
  for (double x : samples)
    if (x >= threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(n);
}

// ---- volume means -------------------------------------------------------------

RadialDensity RadialDensity::unit() {
  return {[](double) { return 0.0; }, "1"};
}

RadialDensity RadialDensity::from_weight(const LogWeight& w) {
  return {[w](double t) { return w.log_w(t); }, w.describe()};
}

RadialDensity RadialDensity::reciprocal(const LogWeight& v) {
  return {[v](double t) { return -v.log_w(t); }, "1/(" + v.describe() + ")"};
}

RadialDensity RadialDensity::one_minus_t2_pow(double alpha) {
  if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
  return {[alpha](double t) { return alpha * std::log1p(-t * t); },
          "(1-t^2)^" + std::to_string(alpha)};
}

namespace {

// Shared partition of [0, max r]: dyadic points below 1/2, the radii, and for
// each radius the points 1 - 2^i (1 - r) clustering toward it.
std::vector<double> polar_cuts(const std::vector<double>& radii) {
  std::vector<double> cuts{0.0};
  const double r_max = radii.back();
  for (double t = 0.5; t > 1.0 / 256; t *= 0.5)
    if (t < r_max) cuts.push_back(t);
  for (double r : radii) {
    cuts.push_back(r);
    for (double gap = 1.0 - r;; gap *= 2) {
      const double t = 1.0 - 2.0 * gap;
      if (t <= 0.5) break;
      cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

PolarProfile polar_log_profile(const std::function<double(double)>& log_integrand,
                               const std::vector<double>& radii, int d,
                               const PolarOptions& options, bool allow_partial) {
  if (d < 1) throw ParameterError("dimension must be >= 1");
  PolarProfile out;
  if (radii.empty()) return out;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0 && radii[i] < 1)) throw RangeError("polar integral needs r in (0, 1)");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InputError("polar profile radii must be strictly increasing");
  }
  const double power = 2.0 * d - 1.0;
  const auto cuts = polar_cuts(radii);
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

  out.log_values.assign(radii.size(), kNaN);
  out.rel_error.assign(radii.size(), kNaN);
  double log_total = kNegInf;
  double log_error = kNegInf;  // accumulated absolute error estimate
  for (std::size_t i = 0; i + 1 < cuts.size() && out.resolved < radii.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    double piece, error = 0;
    try {
      // each piece is scaled by its integrand at the right end
      const double ref = log_integrand(b) + power * std::log(b);
      auto f = [&](double t) {
        return t <= 0 ? 0.0 : std::exp(log_integrand(t) + power * std::log(t) - ref);
      };
      piece = std::log(Rule::integrate(f, a, b, options.max_depth, options.rel_tol, &error)) + ref;
      log_error = logaddexp(log_error, std::log(error) + ref);
    } catch (const ResolutionError&) {
      if (!allow_partial) throw;
      return out;
    }
    log_total = logaddexp(log_total, piece);
    while (out.resolved < radii.size() && radii[out.resolved] == b) {
      out.log_values[out.resolved] = log_total + std::log(2.0 * d) - 2.0 * d * std::log(b);
      out.rel_error[out.resolved] = std::exp(log_error - log_total);
      ++out.resolved;
    }
  }
  return out;
}

double polar_log_integral(const std::function<double(double)>& log_integrand,
                          double r, int d, double rel_tol) {
  return polar_log_profile(log_integrand, {r}, d, {rel_tol, 8}).log_values.front();
}

double log_sphere_q_power(const GapSeries& gs, double q, double t) {
  require_positive_exponent(q);
  const double s = log_radius(t);
  if (q == 2) return 2.0 * gs.log_m2(s);
  const ActiveTerms act = active_terms(gs, s);
  if (act.n.size() <= 1) return q * act.top;
  // the sample count is taken at the outer end of the dyadic band holding t,
  // so it stays constant across each band
  const double band = t <= 0.5 ? 0.5 : 1.0 - std::exp2(std::floor(std::log2(1.0 - t)));
  const Exponent n_ref = std::max(act.n_act, active_terms(gs, log_radius(band)).n_act);
  const std::size_t need = required_samples(n_ref, SamplingOptions{}.oversampling);
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(1024, need));
  if (n > (std::size_t{1} << 23))
    throw ResolutionError("sphere means inside the volume integral need more than 2^23 samples");
  return q * log_power_mean(sample_active(act, n), q);
}

namespace {

PolarOptions volume_polar_options(const GapSeries& gs, double q, double r_max) {
  if (q == 2) return {};
  const Exponent n = active_terms(gs, log_radius(r_max)).n_act;
  const bool cheap = required_samples(n, SamplingOptions{}.oversampling) <= kCheapCircleSamples;
  return {kSampledVolumeTolerance, cheap ? kCheapSampledVolumeDepth : kSampledVolumeDepth};
}

}  // namespace

double weighted_volume_mean(const GapSeries& gs, double q, const RadialDensity& u,
                            double r, int d) {
  require_dim1(gs);
  require_positive_exponent(q);
  if (!(r >= 0 && r < 1)) throw RangeError("radius must lie in [0, 1)");
  if (r == 0) {
    const double f0 = gs.has_constant() ? gs.log_const + gs.log_norm : kNegInf;
    return f0 + u.log_u(0.0) / q;
  }
  const auto prof = polar_log_profile(
      [&](double t) { return log_sphere_q_power(gs, q, t) + u.log_u(t); }, {r}, d,
      volume_polar_options(gs, q, r));
  return prof.log_values.front() / q;
}

double volume_mean(const GapSeries& gs, double q, double r, int d) {
  return weighted_volume_mean(gs, q, RadialDensity::unit(), r, d);
}

IntervalValue weighted_volume_bounds(const GapSeries& gs, double q,
                                     const RadialDensity& u, double r, int d) {
  require_dim1(gs);
  require_positive_exponent(q);
  if (!(r >= 0 && r < 1)) throw RangeError("radius must lie in [0, 1)");
  if (r == 0) {
    const double v = weighted_volume_mean(gs, q, u, 0.0, d);
    return {v, v};
  }
  auto side = [&](bool upper) {
    return polar_log_integral(
               [&](double t) {
                 const IntervalValue b = mp_bounds(gs, q, t);
                 return q * (upper ? b.log_hi : b.log_lo) + u.log_u(t);
               },
               r, d) /
           q;
  };
  return {side(false), side(true)};
}

LogCoefficients volume_smoothing_transform(const LogCoefficients& coeffs, int d) {
  if (d < 1) throw ParameterError("dimension must be >= 1");
  LogCoefficients out;
  out.reserve(coeffs.size());
  for (const auto& [k, la] : coeffs) {
    if (!(k >= 0)) throw InputError("coefficient indices must be non-negative");
    out.emplace_back(k, la + std::log(2.0 * d) - std::log(k + 2.0 * d));
  }
  return out;
}

LogCoefficients inverse_smoothing_transform(const LogCoefficients& coeffs, int d) {
  if (d < 1) throw ParameterError("dimension must be >= 1");
  LogCoefficients out;
  out.reserve(coeffs.size());
  for (const auto& [k, la] : coeffs) {
    if (!(k >= 0)) throw InputError("coefficient indices must be non-negative");
    out.emplace_back(k, la + std::log(k + 2.0 * d));
  }
  return out;
}

LogCoefficients m2_squared_coefficients(const GapSeries& gs) {
  LogCoefficients out;
  out.reserve(gs.terms.size() + 1);
  if (gs.has_constant()) out.emplace_back(0.0, 2.0 * (gs.log_const + gs.log_norm));
  for (const auto& t : gs.terms) out.emplace_back(2.0 * t.n, 2.0 * (t.log_a + gs.log_norm));
  return out;
}

double log_power_series(const LogCoefficients& coeffs, double r) {
  const double s = log_radius(r);
  std::vector<double> logs;
  logs.reserve(coeffs.size());
  for (const auto& [k, la] : coeffs) {
    if (k == 0)
      logs.push_back(la);
    else if (s != kNegInf)
      logs.push_back(la + k * s);
  }
  return logsumexp(logs);
}

// ---- profiles -----------------------------------------------------------------

namespace {

ProfilePoint exact_point(double r, double log_value) {
  return {r, log_value, Mode::exact, 0.0, {log_value, log_value}};
}

ProfilePoint bounds_point(double r, IntervalValue b) {
  return {r, b.mid(), Mode::bounds, b.half_width(), b};
}

}  // namespace

std::vector<MeansProfile> sphere_profiles(const GapSeries& gs,
                                          const std::vector<double>& ps,
                                          const std::vector<double>& radii,
                                          ModePolicy policy) {
  require_dim1(gs);
  std::vector<double> sampled_ps;
  for (double p : ps) {
    require_positive_exponent(p);
    if (p != 2 && p != kInf) sampled_ps.push_back(p);
  }

  std::vector<std::vector<ProfilePoint>> rows(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    const double r = radii[i];
    std::vector<SampledMean> sampled;
    bool use_bounds = policy == ModePolicy::bounds_only;
    if (!use_bounds && !sampled_ps.empty()) {
      if (policy == ModePolicy::automatic && r > kSampledRadiusLimit) {
        use_bounds = true;
      } else {
        try {
          sampled = mp_sampled_many(gs, sampled_ps, r);
        } catch (const ResolutionError&) {
          if (policy == ModePolicy::sampled_only) throw;
          use_bounds = true;
        }
      }
    }
    std::size_t next_sampled = 0;
    for (double p : ps) {
      if (p == 2) {
        rows[i].push_back(exact_point(r, m2_exact(gs, r)));
      } else if (p == kInf) {
        rows[i].push_back(exact_point(r, minf_exact(gs, r)));
      } else if (use_bounds) {
        rows[i].push_back(bounds_point(r, mp_bounds(gs, p, r)));
      } else {
        const SampledMean& sm = sampled[next_sampled++];
        rows[i].push_back({r, sm.log_value, Mode::sampled, sm.log_uncertainty,
                           {sm.log_value - sm.log_uncertainty,
                            sm.log_value + sm.log_uncertainty}});
      }
    }
  });

  std::vector<MeansProfile> out;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    MeansProfile prof;
    prof.kind = MeansProfile::Kind::sphere_p;
    prof.p_or_q = ps[j];
    prof.dim = gs.dim;
    for (std::size_t i = 0; i < radii.size(); ++i) prof.grid.push_back(rows[i][j]);
    out.push_back(std::move(prof));
  }
  return out;
}

MeansProfile sphere_profile(const GapSeries& gs, double p,
                            const std::vector<double>& radii, ModePolicy policy) {
  return sphere_profiles(gs, {p}, radii, policy).front();
}

MeansProfile weighted_profile(const GapSeries& gs, double q, int d,
                              const RadialDensity& u,
                              const std::vector<double>& radii) {
  require_dim1(gs);
  require_positive_exponent(q);
  MeansProfile prof;
  prof.kind = MeansProfile::Kind::weighted_q;
  prof.p_or_q = q;
  prof.dim = d;
  prof.grid.resize(radii.size());

  std::vector<double> positive;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InputError("profile radii must be strictly increasing");
    if (radii[i] == 0)
      prof.grid[i] = exact_point(0.0, weighted_volume_mean(gs, q, u, 0.0, d));
    else
      positive.push_back(radii[i]);
  }
  const std::size_t offset = radii.size() - positive.size();
  const Mode mode = q == 2 ? Mode::exact : Mode::sampled;

  // one pass over a shared partition; radii beyond the first unresolvable
  // piece fall back to integrated sphere-mean brackets
  const auto values = polar_log_profile(
      [&](double t) { return log_sphere_q_power(gs, q, t) + u.log_u(t); }, positive, d,
      positive.empty() ? PolarOptions{} : volume_polar_options(gs, q, positive.back()), true);
  for (std::size_t i = 0; i < values.resolved; ++i) {
    ProfilePoint pt = exact_point(positive[i], values.log_values[i] / q);
    pt.mode = mode;
    pt.log_uncertainty = std::log1p(values.rel_error[i]) / q;
    pt.bracket = {pt.log_value - pt.log_uncertainty, pt.log_value + pt.log_uncertainty};
    prof.grid[offset + i] = pt;
  }
  if (values.resolved < positive.size()) {
    const std::vector<double> rest(positive.begin() + values.resolved, positive.end());
    auto side = [&](bool upper) {
      return polar_log_profile(
                 [&](double t) {
                   const IntervalValue b = mp_bounds(gs, q, t);
                   return q * (upper ? b.log_hi : b.log_lo) + u.log_u(t);
                 },
                 rest, d)
          .log_values;
    };
    const auto lo = side(false), hi = side(true);
    for (std::size_t i = 0; i < rest.size(); ++i)
      prof.grid[offset + values.resolved + i] = bounds_point(rest[i], {lo[i] / q, hi[i] / q});
  }
  return prof;
}

MeansProfile volume_profile(const GapSeries& gs, double q, int d,
                            const std::vector<double>& radii) {
  MeansProfile prof = weighted_profile(gs, q, d, RadialDensity::unit(), radii);
  prof.kind = MeansProfile::Kind::volume_q;
  return prof;
}

}  // namespace gapmeans

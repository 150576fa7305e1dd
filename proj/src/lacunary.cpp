#include "gapmeans/lacunary.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "gapmeans/error.hpp"

namespace gapmeans {

std::pair<std::size_t, std::size_t> GapSeries::window(double s, double nats) const {
  const std::size_t count = terms.size();
  if (count == 0 || s == kNegInf) return {0, 0};
  if (count <= kFullScanTerms) return {0, count};

  // log a_k + n_k s is unimodal in k for envelope-derived coefficients
  std::size_t lo = 0, hi = count - 1;
  while (hi - lo > 2) {
    const std::size_t m1 = lo + (hi - lo) / 3;
    const std::size_t m2 = hi - (hi - lo) / 3;
    if (terms[m1].log_term(s) < terms[m2].log_term(s))
      lo = m1 + 1;
    else
      hi = m2;
  }
  std::size_t peak = lo;
  for (std::size_t k = lo + 1; k <= hi; ++k)
    if (terms[k].log_term(s) > terms[peak].log_term(s)) peak = k;

  const double top = std::max(terms[peak].log_term(s),
                              has_constant() ? log_const : kNegInf);
  const double cutoff = top - nats;
  if (terms[peak].log_term(s) < cutoff) return {peak, peak};
  std::size_t first = peak, last = peak + 1;
  while (first > 0 && terms[first - 1].log_term(s) >= cutoff) --first;
  while (last < count && terms[last].log_term(s) >= cutoff) ++last;
  return {first, last};
}

std::vector<double> GapSeries::term_logs(double s) const {
  const auto [first, last] = window(s);
  std::vector<double> logs;
  logs.reserve(last - first + 1);
  if (has_constant()) logs.push_back(log_const + log_norm);
  for (std::size_t k = first; k < last; ++k)
    logs.push_back(terms[k].log_term(s) + log_norm);
  return logs;
}

double GapSeries::log_sum(double s) const { return logsumexp(term_logs(s)); }

double GapSeries::log_m2(double s) const {
  auto logs = term_logs(s);
  for (double& x : logs) x *= 2;
  return 0.5 * logsumexp(logs);
}

Exponent GapSeries::active_exponent(double s, double window_nats) const {
  const auto logs = term_logs(s);
  if (logs.empty()) return 0;
  const double top = *std::max_element(logs.begin(), logs.end());
  const auto [first, last] = window(s);
  Exponent active = 0;
  for (std::size_t k = first; k < last; ++k)
    if (terms[k].log_term(s) + log_norm >= top - window_nats) active = terms[k].n;
  return active;
}

void validate(const GapSeries& gs) {
  if (gs.dim < 1) throw InputError("series dimension must be >= 1");
  if (!(std::isfinite(gs.log_const) || gs.log_const == kNegInf))
    throw InputError("series constant term must be finite or zero");
  if (!std::isfinite(gs.log_norm)) throw InputError("series normalization must be finite");
  for (std::size_t k = 0; k < gs.terms.size(); ++k) {
    const auto& t = gs.terms[k];
    if (!is_valid_exponent(t.n) || t.n == 0)
      throw InputError("series exponents must be positive integers <= 2^100");
    if (!std::isfinite(t.log_a)) throw InputError("series coefficients must be finite");
    if (k > 0 && !(t.n > gs.terms[k - 1].n))
      throw InputError("series exponents must be strictly increasing");
  }
  // windowed evaluation of long series relies on concave log-coefficients
  if (gs.terms.size() > kFullScanTerms) {
    for (std::size_t k = 2; k < gs.terms.size(); ++k) {
      const auto& a = gs.terms[k - 2];
      const auto& b = gs.terms[k - 1];
      const auto& c = gs.terms[k];
      const double left = (b.log_a - a.log_a) / (b.n - a.n);
      const double right = (c.log_a - b.log_a) / (c.n - b.n);
      if (right > left + 1e-6 * (std::abs(left) + 1e-300))
        throw InputError("series with more than 256 terms must have log-coefficients concave in n");
    }
  }
}

namespace {

// log-radius where line b overtakes line a (b.slope > a.slope).
double crossover(double a_slope, double a_log, double b_slope, double b_log) {
  return (a_log - b_log) / (b_slope - a_slope);
}

double crossover(const SupportLine& a, const SupportLine& b) {
  return crossover(a.slope, a.log_intercept, b.slope, b.log_intercept);
}

// Scan-based selection for envelopes without an attached weight: candidates
// are the stored lines only and drops are measured against env.eval.
void select_from_stored_lines(const NewtonEnvelope& env, double log_lambda,
                              double s_end, GapSeries& gs) {
  const auto& lines = env.lines();
  std::size_t current = 0;
  while (env.eval(s_end) - lines[current].at(s_end) > log_lambda) {
    std::size_t chosen = current;
    for (std::size_t i = current + 1; i < lines.size(); ++i) {
      double x = crossover(lines[current], lines[i]);
      if (!(x < 0.0)) continue;
      x = std::max(x, env.s_floor());
      if (env.eval(x) - lines[current].at(x) > log_lambda) {
        if (chosen == current) chosen = i;
        break;
      }
      chosen = i;
    }
    if (chosen == current)
      throw ConstructionError("envelope slope range too small to cover the certification range",
                              std::exp(s_end));
    gs.terms.push_back({lines[chosen].slope, lines[chosen].log_intercept});
    current = chosen;
  }
}

// Hard stop against runaway selections.
constexpr std::size_t kMaxTerms = 20'000'000;

}  // namespace

GapSeries select_gap_terms(const NewtonEnvelope& env,
                           const SelectionOptions& options) {
  if (!(options.lambda > 1.0)) throw ParameterError("lambda must exceed 1");
  if (!(options.theta > 0.0 && options.theta < 1.0))
    throw ParameterError("theta must lie in (0,1)");
  const double log_lambda = std::log(options.lambda);
  const double s_end = options.s_end;

  const auto& lines = env.lines();
  if (lines.front().slope != 0)
    throw InputError("envelope must contain the slope-0 line");

  GapSeries gs;
  gs.log_const = lines.front().log_intercept;

  if (!env.source()) {
    select_from_stored_lines(env, log_lambda, s_end, gs);
  } else {
    const LogWeight& w = *env.source();
    const double s_floor = env.s_floor();
    SupportLine current = lines.front();

    // phi(x) - current(x) at the crossover with the candidate. phi bounds the
    // integer envelope from above, so this over-estimates the envelope drop.
    auto passes = [&](const SupportLine& candidate) {
      if (candidate.boundary) return false;
      double x = crossover(current, candidate);
      if (!(x < 0.0)) return false;
      x = std::max(x, s_floor);
      return w.phi(x) - current.at(x) <= log_lambda;
    };

    Exponent step = 1, prev_step = 1;
    while (w.phi(s_end) - current.at(s_end) > log_lambda) {
      if (gs.terms.size() >= kMaxTerms)
        throw ConstructionError("gap selection exceeded the term limit",
                                std::exp(current.touch_s));
      const Exponent base = current.slope;
      auto clamp_delta = [&](Exponent delta) {
        return std::max<Exponent>(1, std::min(std::floor(delta), kExponentCap - base));
      };
      std::optional<SupportLine> best;
      auto try_delta = [&](Exponent delta) {
        const SupportLine line = support_coefficient(w, base + delta);
        if (!passes(line)) return false;
        if (!best || line.slope > best->slope) best = line;
        return true;
      };

      // Steps vary smoothly along the envelope: extrapolate the last step
      // ratio, bracket by galloping, then bisect to within 3% of the largest
      // admissible step.
      const Exponent guess = clamp_delta(step * std::clamp(step / prev_step, 0.5, 2.0));
      Exponent lo = 0, hi = 0;
      if (try_delta(guess)) {
        lo = guess;
        hi = clamp_delta(guess * 1.03 + 1);
        while (hi > lo && try_delta(hi)) {
          lo = hi;
          hi = clamp_delta(hi * 2);
        }
      } else {
        hi = guess;
        lo = clamp_delta(guess / 1.03);
        while (lo < hi && !try_delta(lo)) {
          hi = lo;
          if (lo == 1) break;
          lo = clamp_delta(lo / 2);
        }
        if (!best) lo = 0;
      }
      if (best) {
        while (hi - lo > std::max<Exponent>(1, 0.03 * lo) &&
               next_exponent(base + lo) < base + hi) {
          const Exponent mid = clamp_delta(lo + (hi - lo) / 2);
          if (mid <= lo || mid >= hi) break;
          if (try_delta(mid))
            lo = mid;
          else
            hi = mid;
        }
      } else {
        best = support_coefficient(w, next_exponent(base));
        if (best->boundary)
          throw ConstructionError("no admissible slope beyond the current term",
                                  std::exp(current.touch_s));
      }
      prev_step = step;
      step = std::max<Exponent>(1, best->slope - base);
      gs.terms.push_back({best->slope, best->log_intercept});
      current = *best;
    }
  }

  if (!gs.terms.empty()) {
    const auto& first = gs.terms.front();
    gs.r0_certified = std::exp(crossover(0, gs.log_const, first.n, first.log_a));
  }

  // parity-class dominance at every certification radius from r0 on
  if (gs.terms.size() >= 2) {
    std::vector<double> grid;
    for (double s : certification_grid(gs))
      if (s >= std::log(gs.r0_certified) && s <= s_end) grid.push_back(s);
    const ParityCert cert = certify_parity(gs, grid);
    const double target = -std::log(options.theta);
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (cert.dominance.margin[i] < target)
        throw ConstructionError(
            "parity dominance below target at r = " + std::to_string(std::exp(grid[i])),
            std::exp(grid[i]));
  }
  return gs;
}

std::pair<GapSeries, GapSeries> split_even_odd(const GapSeries& gs) {
  if (gs.terms.size() < 2)
    throw InputError("parity split needs at least 2 terms");
  GapSeries g1, g2;
  for (GapSeries* g : {&g1, &g2}) {
    g->dim = gs.dim;
    g->log_const = kNegInf;
    g->r0_certified = gs.r0_certified;
    g->log_norm = gs.log_norm;
  }
  for (std::size_t k = 0; k < gs.terms.size(); ++k)
    (k % 2 == 0 ? g1 : g2).terms.push_back(gs.terms[k]);
  return {g1, g2};
}

std::vector<GapTerm> merge_even_odd(const GapSeries& g1, const GapSeries& g2) {
  std::vector<GapTerm> merged;
  merged.reserve(g1.terms.size() + g2.terms.size());
  for (std::size_t k = 0; k < std::max(g1.terms.size(), g2.terms.size()); ++k) {
    if (k < g1.terms.size()) merged.push_back(g1.terms[k]);
    if (k < g2.terms.size()) merged.push_back(g2.terms[k]);
  }
  return merged;
}

std::vector<double> certification_grid(const GapSeries& gs, int j_max) {
  std::vector<double> grid;
  for (int j = 0; j <= j_max; ++j) grid.push_back(dyadic_log_radius(j));

  std::vector<double> crossings;
  double prev_n = 0, prev_log = gs.log_const;
  bool have_prev = gs.has_constant();
  for (const auto& t : gs.terms) {
    if (have_prev) crossings.push_back(crossover(prev_n, prev_log, t.n, t.log_a));
    prev_n = t.n;
    prev_log = t.log_a;
    have_prev = true;
  }
  const double s_last = dyadic_log_radius(j_max);
  // long series (fast-growing weights) keep an evenly thinned subset
  const std::size_t stride = std::max<std::size_t>(1, crossings.size() / kMaxMidpoints);
  for (std::size_t i = 0; i + 1 < crossings.size(); i += stride) {
    const double mid = 0.5 * (crossings[i] + crossings[i + 1]);
    if (mid < 0 && mid <= s_last && mid > kDefaultLogRadiusFloor) grid.push_back(mid);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

DominanceCert certify_dominance(const GapSeries& gs,
                                const std::vector<double>& grid_s) {
  DominanceCert cert;
  cert.s = grid_s;
  cert.margin.reserve(grid_s.size());
  for (double s : grid_s) {
    auto logs = gs.term_logs(s);
    double margin = kInf;
    if (logs.size() >= 2) {
      const auto top = std::max_element(logs.begin(), logs.end());
      const double max_log = *top;
      logs.erase(top);
      margin = max_log - logsumexp(logs);
    }
    cert.margin.push_back(margin);
    cert.theta_min = std::min(cert.theta_min, margin);
  }
  return cert;
}

ParityCert certify_parity(const GapSeries& gs, const std::vector<double>& grid_s) {
  ParityCert cert;
  cert.dominance.s = grid_s;
  if (gs.terms.empty()) {
    cert.dominance.margin.assign(grid_s.size(), kInf);
    cert.log_lower.assign(grid_s.size(), kNegInf);
    return cert;
  }
  GapSeries g1 = gs, g2 = gs;
  g1.log_const = g2.log_const = kNegInf;
  g1.terms.clear();
  g2.terms.clear();
  for (std::size_t k = 0; k < gs.terms.size(); ++k)
    (k % 2 == 0 ? g1 : g2).terms.push_back(gs.terms[k]);

  for (double s : grid_s) {
    double best_margin = kNegInf;
    double best_lower = kNegInf;
    for (const GapSeries* g : {&g1, &g2}) {
      auto logs = g->term_logs(s);
      if (logs.empty()) continue;
      const auto top = std::max_element(logs.begin(), logs.end());
      const double max_log = *top;
      logs.erase(top);
      const double rest = logsumexp(logs);
      const double margin = max_log - rest;
      best_margin = std::max(best_margin, margin);
      // log(M - R) = log M + log(1 - e^{-margin})
      if (margin > 0)
        best_lower = std::max(best_lower, max_log + log1mexp(margin));
    }
    cert.dominance.margin.push_back(best_margin);
    cert.dominance.theta_min = std::min(cert.dominance.theta_min, best_margin);
    cert.log_lower.push_back(best_lower);
  }
  return cert;
}

GapSeries theorem1_series(const LogWeight& w, const SynthesisOptions& options) {
  const double s_end = options.selection.s_end;
  const Exponent n_max = covering_slope(w, s_end);
  if (n_max >= kExponentCap)
    throw RangeError("weight grows too fast: covering slope exceeds 2^100");
  const NewtonEnvelope env = build_envelope(w, n_max);
  GapSeries gs = select_gap_terms(env, options.selection);

  // one global rescaling so that M_2(f, r) >= w(r) on the grid
  double deficit = 0;
  for (double s : certification_grid(gs, options.grid_j_max))
    deficit = std::max(deficit, w.phi(s) - gs.log_m2(s));
  gs.log_norm = deficit;
  return gs;
}

}  // namespace gapmeans

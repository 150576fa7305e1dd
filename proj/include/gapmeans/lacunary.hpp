#pragma once

#include <utility>
#include <vector>

#include "gapmeans/envelope.hpp"
#include "gapmeans/numeric.hpp"
#include "gapmeans/weights.hpp"

namespace gapmeans {

struct GapTerm {
  Exponent n = 0;
  double log_a = 0;

  double log_term(double s) const { return log_a + n * s; }
};

// Terms further than this below the largest one are dropped from
// evaluations; with at most 2e7 terms the dropped mass is below 1e-19.
inline constexpr double kEvalWindow = 60.0;
inline constexpr std::size_t kFullScanTerms = 256;
// Midpoints of crossovers kept in certification grids.
inline constexpr std::size_t kMaxMidpoints = 2048;

// f(z) = exp(log_norm) * (exp(log_const) + sum_k a_k z^{n_k}), all a_k > 0.
//
// terms hold the raw support coefficients a_k = c_{n_k}; log_norm is the single
// global rescaling applied by theorem1_series. log_const = -inf encodes a zero
// constant term (the halves g1, g2 of a parity split).
struct GapSeries {
  int dim = 1;
  double log_const = 0;
  std::vector<GapTerm> terms;
  double r0_certified = 0;
  double log_norm = 0;

  // Index range [first, last) of the terms within `nats` of the largest term
  // at log-radius s (constant included). Short series return every term.
  std::pair<std::size_t, std::size_t> window(double s, double nats = kEvalWindow) const;
  // log of the non-negligible coefficient terms at log-radius s, constant first,
  // normalization included.
  std::vector<double> term_logs(double s) const;
  // log f(r) = log M_inf(f, r) (positive coefficients).
  double log_sum(double s) const;
  // log M_2(f, r), exact by orthogonality of distinct monomials.
  double log_m2(double s) const;
  // Largest exponent whose term is within `window` nats of the largest term.
  Exponent active_exponent(double s, double window_nats) const;
  bool has_constant() const { return log_const != kNegInf; }
};

// Throws InputError unless exponents are valid, positive and strictly
// increasing and all coefficients are finite.
void validate(const GapSeries& gs);

struct SelectionOptions {
  // Largest allowed drop factor of the selected envelope at crossovers.
  double lambda = 2.718281828459045;
  // Parity-class dominance target: at every certification radius one parity
  // class must have its largest term >= sum of its other terms / theta.
  double theta = 0.5;
  // Right end of the certification range (log radius).
  double s_end = dyadic_log_radius(40);
};

// Greedy crossover-drop selection on the envelope. a_k = c_{n_k}; log_const is
// the slope-0 intercept log w(0).
GapSeries select_gap_terms(const NewtonEnvelope& env,
                           const SelectionOptions& options = {});

// Odd-indexed terms (1st, 3rd, ...) and even-indexed terms, both with a zero
// constant term.
std::pair<GapSeries, GapSeries> split_even_odd(const GapSeries& gs);
std::vector<GapTerm> merge_even_odd(const GapSeries& g1, const GapSeries& g2);

// log r_j for j = 0..j_max (r_0 = 0 gives -inf) plus the midpoints of
// consecutive crossover log-radii of the series lines, sorted.
std::vector<double> certification_grid(const GapSeries& gs, int j_max = 40);

struct DominanceCert {
  std::vector<double> s;
  // log(max term) - log(sum of other terms); +inf with no competitors.
  std::vector<double> margin;
  double theta_min = kInf;
};

DominanceCert certify_dominance(const GapSeries& gs,
                                const std::vector<double>& grid_s);

// Per radius, the better of the two parity-class margins, together with the
// resulting lower bound log(max_c (M_c - R_c)) <= log(|g1| + |g2|) valid at
// every angle.
struct ParityCert {
  DominanceCert dominance;
  std::vector<double> log_lower;
};

ParityCert certify_parity(const GapSeries& gs, const std::vector<double>& grid_s);

struct SynthesisOptions {
  SelectionOptions selection;
  int grid_j_max = 40;
};

// Envelope + gap selection + global normalization so that M_2(f, r) >= w(r)
// on the certification grid.
GapSeries theorem1_series(const LogWeight& w, const SynthesisOptions& options = {});

}  // namespace gapmeans

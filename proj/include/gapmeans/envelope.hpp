#pragma once

#include <optional>
#include <vector>

#include "gapmeans/weights.hpp"

namespace gapmeans {

// Series exponents are non-negative integers stored in a double: the fast
// growth families need exponents far beyond 2^64 near r = 1 - 2^-40, and every
// double >= 2^53 is an integer anyway.
using Exponent = double;

inline constexpr double kExponentCap = 0x1p100;
// Right end of the support-coefficient search domain.
inline constexpr double kLogRadiusCeiling = -0x1p-60;

bool is_valid_exponent(Exponent n);
// Smallest representable exponent above n.
Exponent next_exponent(Exponent n);

// Affine minorant log c_n + n s of phi, touching it at touch_s.
struct SupportLine {
  Exponent slope = 0;
  double log_intercept = 0;
  double touch_s = 0;
  // Touch point pinned to an end of the search domain.
  bool boundary = false;

  double at(double s) const {
    return slope == 0 ? log_intercept : log_intercept + slope * s;
  }
};

// log c_n = inf_{s in [s_floor, 0)} (phi(s) - n s).
SupportLine support_coefficient(const LogWeight& w, Exponent n);

// Support lines on a thinned slope set. Evaluation re-densifies to the exact
// integer-slope envelope when the source weight is attached.
class NewtonEnvelope {
 public:
  NewtonEnvelope(std::vector<SupportLine> lines, std::optional<LogWeight> source);

  const std::vector<SupportLine>& lines() const { return lines_; }
  const std::optional<LogWeight>& source() const { return source_; }
  double s_floor() const;

  // log sup_n c_n e^{n s}
  double eval(double s) const;
  // The maximizing line at s (integer-refined when the source is attached).
  SupportLine best_line(double s) const;

 private:
  std::vector<SupportLine> lines_;
  std::optional<LogWeight> source_;
};

// Slopes 0..16, then ratio-1.1 spacing up to n_max (inclusive).
std::vector<Exponent> thinned_slopes(Exponent n_max);

NewtonEnvelope build_envelope(const LogWeight& w, Exponent n_max);

double envelope_eval(const NewtonEnvelope& env, double s);

// Slope needed to cover the weight up to log-radius s_end with some room to
// spare: roughly twice the local log-log derivative, at least 16.
Exponent covering_slope(const LogWeight& w, double s_end);

}  // namespace gapmeans

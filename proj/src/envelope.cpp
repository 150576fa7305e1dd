#include "gapmeans/envelope.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "gapmeans/error.hpp"
#include "gapmeans/numeric.hpp"
#include "gapmeans/parallel.hpp"

namespace gapmeans {

Exponent next_exponent(Exponent n) {
  return n < 0x1p53 ? n + 1 : std::nextafter(n, kInf);
}

bool is_valid_exponent(Exponent n) {
  return n >= 0 && n <= kExponentCap && std::trunc(n) == n;
}

SupportLine support_coefficient(const LogWeight& w, Exponent n) {
  if (!is_valid_exponent(n))
    throw RangeError("slope must be a non-negative integer <= 2^100");
  if (n == 0) {
    // phi is non-decreasing, so the infimum is the value at r = 0
    double at_zero = w.phi(kNegInf);
    if (!std::isfinite(at_zero)) at_zero = w.phi(w.s_floor());
    return {0, at_zero, kNegInf, true};
  }

  // Minimize over t = log(-s): the objective is unimodal in s, hence in t,
  // and t resolves touch points near s = 0 to relative precision.
  const double t_lo = std::log(-kLogRadiusCeiling);
  const double t_hi = std::log(-w.s_floor());
  auto objective = [&](double t) {
    const double s = -std::exp(t);
    return w.phi(s) - n * s;
  };
  std::uintmax_t max_iter = 400;
  const auto [t_coarse, v_coarse] =
      boost::math::tools::brent_find_minima(objective, t_lo, t_hi, 40, max_iter);
  // Brent's tolerance is relative to |t|; repeat around the coarse optimum in
  // a shifted variable so steep weights get the minimum value to rounding.
  const double h = std::min(0x1p-18 * std::max(1.0, std::abs(t_coarse)), 0.5 * (t_hi - t_lo));
  const double x_lo = std::max(t_lo, t_coarse - h) - t_coarse;
  const double x_hi = std::min(t_hi, t_coarse + h) - t_coarse;
  max_iter = 400;
  auto [x_fine, v_fine] = boost::math::tools::brent_find_minima(
      [&](double x) { return objective(t_coarse + x); }, x_lo, x_hi, 40, max_iter);
  double t_best = t_coarse + x_fine, value = v_fine;
  if (v_coarse < v_fine) {
    t_best = t_coarse;
    value = v_coarse;
  }
  const double s_best = -std::exp(t_best);
  const double phi_best = w.phi(s_best);

  // Brent returns an upper estimate of the minimum; shave off the rounding
  // scale so the line stays a minorant.
  const double slack =
      4e-16 * (1.0 + std::abs(phi_best) + std::abs(n * s_best));
  const double t_span = t_hi - t_lo;
  const bool boundary = (t_best - t_lo) < 1e-9 * t_span ||
                        (t_hi - t_best) < 1e-9 * t_span;
  return {n, value - slack, s_best, boundary};
}

NewtonEnvelope::NewtonEnvelope(std::vector<SupportLine> lines,
                               std::optional<LogWeight> source)
    : lines_(std::move(lines)), source_(std::move(source)) {
  if (lines_.empty()) throw InputError("envelope needs at least one line");
  std::sort(lines_.begin(), lines_.end(),
            [](const SupportLine& a, const SupportLine& b) {
              return a.slope < b.slope;
            });
  for (std::size_t i = 1; i < lines_.size(); ++i)
    if (!(lines_[i].slope > lines_[i - 1].slope))
      throw InputError("envelope slopes must be distinct");
}

double NewtonEnvelope::s_floor() const {
  return source_ ? source_->s_floor() : kDefaultLogRadiusFloor;
}

SupportLine NewtonEnvelope::best_line(double s) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < lines_.size(); ++i)
    if (lines_[i].at(s) > lines_[best].at(s)) best = i;
  if (!source_) return lines_[best];

  // The integer-slope objective h(n) = log c_n + n s is concave in n, so its
  // maximum lies between the stored neighbours of the best stored line.
  Exponent lo = lines_[best > 0 ? best - 1 : 0].slope;
  Exponent hi = lines_[std::min(best + 1, lines_.size() - 1)].slope;
  SupportLine winner = lines_[best];
  auto value = [&](Exponent n) {
    const SupportLine line = support_coefficient(*source_, n);
    if (line.at(s) > winner.at(s)) winner = line;
    return line.at(s);
  };
  while (next_exponent(next_exponent(lo)) < hi) {
    Exponent m1 = std::max(std::floor(lo + (hi - lo) / 3), next_exponent(lo));
    Exponent m2 = std::max(std::floor(hi - (hi - lo) / 3), next_exponent(m1));
    if (m2 >= hi) break;
    if (value(m1) < value(m2))
      lo = m1;
    else
      hi = m2;
  }
  for (Exponent n = lo; n <= hi; n = next_exponent(n)) value(n);
  return winner;
}

double NewtonEnvelope::eval(double s) const { return best_line(s).at(s); }

std::vector<Exponent> thinned_slopes(Exponent n_max) {
  std::vector<Exponent> slopes;
  for (Exponent n = 0; n <= std::min<Exponent>(16, n_max); ++n) slopes.push_back(n);
  Exponent n = 16;
  while (n < n_max) {
    n = std::max(n + 1, std::round(n * 1.1));
    slopes.push_back(std::min(n, n_max));
  }
  return slopes;
}

NewtonEnvelope build_envelope(const LogWeight& w, Exponent n_max) {
  if (!(n_max >= 1)) throw ParameterError("n_max must be at least 1");
  if (n_max > kExponentCap) throw RangeError("n_max exceeds the exponent cap 2^100");
  n_max = std::floor(n_max);
  const auto slopes = thinned_slopes(n_max);
  std::vector<SupportLine> lines(slopes.size());
  parallel_for(slopes.size(),
               [&](std::size_t i) { lines[i] = support_coefficient(w, slopes[i]); });
  return NewtonEnvelope(std::move(lines), w);
}

double envelope_eval(const NewtonEnvelope& env, double s) {
  if (!(s >= env.s_floor() && s < 0))
    throw RangeError("envelope evaluated outside [s_floor, 0)");
  return env.eval(s);
}

Exponent covering_slope(const LogWeight& w, double s_end) {
  // one-sided secant slope just left of s_end bounds phi'(s_end) from below;
  // the right-hand secant over the same width bounds it from above
  const double h = std::max(-s_end * 1e-3, 1e-300);
  const double right = std::min(s_end + h, 0.5 * s_end);
  const double slope = (w.phi(right) - w.phi(s_end)) / (right - s_end);
  const double target = std::ceil(std::max(16.0, 2.0 * slope + 16.0));
  return std::min(target, kExponentCap);
}

}  // namespace gapmeans

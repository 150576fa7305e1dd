#include "gapmeans/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gapmeans/error.hpp"
#include "gapmeans/numeric.hpp"

namespace gapmeans {

LogWeight::LogWeight(Kind kind, Params params, Phi phi, double s_floor)
    : kind_(kind),
      params_(std::move(params)),
      phi_(std::make_shared<const Phi>(std::move(phi))),
      s_floor_(s_floor) {}

double LogWeight::log_w(double r) const {
  if (!(r >= 0.0 && r < 1.0))
    throw RangeError("weight evaluated outside [0,1): r = " + std::to_string(r));
  return phi(r == 0.0 ? kNegInf : std::log(r));
}

std::string to_string(LogWeight::Kind kind) {
  switch (kind) {
    case LogWeight::Kind::power: return "power";
    case LogWeight::Kind::exp: return "exp";
    case LogWeight::Kind::log: return "log";
    case LogWeight::Kind::constant: return "const";
    case LogWeight::Kind::sampled: return "samples";
    case LogWeight::Kind::product: return "product";
    case LogWeight::Kind::power_of: return "power-of";
    case LogWeight::Kind::series: return "series";
  }
  return "unknown";
}

std::string LogWeight::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(kind_);
  char sep = ':';
  for (const auto& [key, value] : params_) {
    out << sep << key << '=' << value;
    sep = ',';
  }
  return out.str();
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ParameterError(std::string(name) + " must be a positive finite number");
}

}  // namespace

LogWeight make_power_weight(double alpha) {
  require_positive(alpha, "alpha");
  return LogWeight(LogWeight::Kind::power, {{"alpha", alpha}},
                   [alpha](double s) { return -alpha * log1m_exp_s(s); });
}

LogWeight make_exp_weight(double c, double beta) {
  require_positive(c, "c");
  require_positive(beta, "beta");
  return LogWeight(LogWeight::Kind::exp, {{"beta", beta}, {"c", c}},
                   [c, beta](double s) {
                     return c * std::exp(-beta * log1m_exp_s(s));
                   });
}

LogWeight make_log_weight(double gamma) {
  require_positive(gamma, "gamma");
  return LogWeight(LogWeight::Kind::log, {{"gamma", gamma}},
                   [gamma](double s) {
                     return gamma * std::log(1.0 - log1m_exp_s(s));
                   });
}

LogWeight make_constant_weight(double A) {
  require_positive(A, "A");
  const double log_a = std::log(A);
  return LogWeight(LogWeight::Kind::constant, {{"A", A}},
                   [log_a](double) { return log_a; });
}

LogWeight weight_from_samples(std::vector<SamplePoint> samples,
                              double tol_convex) {
  if (samples.size() < 3)
    throw InputError("sampled weight needs at least 3 samples");
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples[i];
    if (!(p.r > 0.0 && p.r < 1.0) || !std::isfinite(p.log_w))
      throw InputError("sample radius outside (0,1) or non-finite log_w");
    if (i > 0 && !(p.r > samples[i - 1].r))
      throw InputError("sample radii must be strictly increasing");
    if (i > 0 && p.log_w < samples[i - 1].log_w)
      throw MonotonicityError("log_w decreases at r = " + std::to_string(p.r));
    xs.push_back(std::log(p.r));
    ys.push_back(p.log_w);
  }

  // deviation of every sample above the lower convex hull
  const auto hull = lower_hull(xs, ys);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t a = hull[h], b = hull[h + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double t = (xs[i] - xs[a]) / (xs[b] - xs[a]);
      const double on_hull = ys[a] + t * (ys[b] - ys[a]);
      const double scale = std::max(1.0, std::abs(ys[i]));
      if (ys[i] - on_hull > tol_convex * scale)
        throw ConvexityError("sampled weight is not log-convex near r = " +
                             std::to_string(samples[i].r));
    }
  }

  const double last_slope =
      (ys.back() - ys[ys.size() - 2]) / (xs.back() - xs[xs.size() - 2]);
  auto phi = [xs, ys, last_slope](double s) {
    if (s <= xs.front()) return ys.front();
    if (s >= xs.back()) return ys.back() + last_slope * (s - xs.back());
    const auto it = std::upper_bound(xs.begin(), xs.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (s - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
  };
  return LogWeight(LogWeight::Kind::sampled,
                   {{"count", static_cast<double>(samples.size())}},
                   std::move(phi));
}

LogWeight weight_product(const LogWeight& a, const LogWeight& b) {
  LogWeight::Params params;
  for (const auto& [k, v] : a.params()) params["a." + k] = v;
  for (const auto& [k, v] : b.params()) params["b." + k] = v;
  return LogWeight(LogWeight::Kind::product, std::move(params),
                   [a, b](double s) { return a.phi(s) + b.phi(s); },
                   std::max(a.s_floor(), b.s_floor()));
}

LogWeight weight_power(const LogWeight& w, double q) {
  require_positive(q, "q");
  LogWeight::Params params{{"q", q}};
  for (const auto& [k, v] : w.params()) params["base." + k] = v;
  return LogWeight(LogWeight::Kind::power_of, std::move(params),
                   [w, q](double s) { return q * w.phi(s); }, w.s_floor());
}

LogWeight weight_from_power_series(
    std::vector<std::pair<double, double>> exponent_log_coeff) {
  if (exponent_log_coeff.empty())
    throw InputError("power-series weight needs at least one term");
  bool has_constant = false;
  for (const auto& [k, log_b] : exponent_log_coeff) {
    if (!(k >= 0.0) || !std::isfinite(log_b))
      throw InputError("power-series weight needs k >= 0 and finite log coefficients");
    has_constant = has_constant || k == 0.0;
  }
  if (!has_constant)
    throw InputError("power-series weight needs a positive constant term");
  auto phi = [terms = std::move(exponent_log_coeff)](double s) {
    std::vector<double> logs;
    logs.reserve(terms.size());
    for (const auto& [k, log_b] : terms)
      logs.push_back(k == 0.0 ? log_b : log_b + k * s);
    return logsumexp(logs);
  };
  return LogWeight(LogWeight::Kind::series, {}, std::move(phi));
}

ConvexityReport check_log_convexity(const std::vector<CurvePoint>& curve,
                                    double tol) {
  if (curve.size() < 3)
    throw InputError("convexity check needs at least 3 points");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve[i].r > 0.0))
      throw InputError("convexity check needs r > 0");
    if (i > 0 && !(curve[i].r > curve[i - 1].r))
      throw InputError("convexity check needs strictly increasing r");
  }
  ConvexityReport report;
  report.max_defect = kNegInf;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double x1 = std::log(curve[i - 1].r), x2 = std::log(curve[i].r),
                 x3 = std::log(curve[i + 1].r);
    const double y1 = curve[i - 1].log_value, y2 = curve[i].log_value,
                 y3 = curve[i + 1].log_value;
    const double scale =
        std::max({1.0, std::abs(y1), std::abs(y2), std::abs(y3)});
    const double defect = convexity_defect(x1, y1, x2, y2, x3, y3) / scale;
    if (defect > report.max_defect) {
      report.max_defect = defect;
      report.worst_index = i;
    }
  }
  report.pass = report.max_defect <= tol;
  return report;
}

}  // namespace gapmeans

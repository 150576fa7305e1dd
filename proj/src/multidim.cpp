#include "gapmeans/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gapmeans/error.hpp"
#include "gapmeans/numeric.hpp"
#include "gapmeans/parallel.hpp"

namespace gapmeans {

namespace {

// pw[i * (degree + 1) + j] = z_i^j
void powers(const Point& z, int degree, std::vector<Complex>& pw) {
  const std::size_t stride = static_cast<std::size_t>(degree) + 1;
  pw.resize(z.size() * stride);
  for (std::size_t i = 0; i < z.size(); ++i) {
    Complex* row = pw.data() + i * stride;
    row[0] = 1;
    for (int j = 1; j <= degree; ++j) row[j] = row[j - 1] * z[i];
  }
}

void normalize(Point& z) {
  double norm = 0;
  for (const auto& c : z) norm += std::norm(c);
  norm = std::sqrt(norm);
  for (auto& c : z) c /= norm;
}

}  // namespace

Complex HomPoly::eval(const Point& z) const {
  thread_local std::vector<Complex> pw;
  powers(z, degree, pw);
  const std::size_t stride = static_cast<std::size_t>(degree) + 1;
  Complex sum = 0;
  for (std::size_t m = 0; m < alphas.size(); ++m) {
    Complex term = coeffs[m];
    for (int i = 0; i < dim; ++i) term *= pw[i * stride + alphas[m][i]];
    sum += term;
  }
  return sum;
}

Complex HomPoly::eval(const Point& z, Point& grad) const {
  thread_local std::vector<Complex> pw;
  powers(z, degree, pw);
  const std::size_t stride = static_cast<std::size_t>(degree) + 1;
  grad.assign(dim, 0);
  Complex sum = 0;
  for (std::size_t m = 0; m < alphas.size(); ++m) {
    const auto& a = alphas[m];
    Complex term = coeffs[m];
    for (int i = 0; i < dim; ++i) term *= pw[i * stride + a[i]];
    sum += term;
    for (int i = 0; i < dim; ++i) {
      if (a[i] == 0) continue;
      Complex partial = coeffs[m] * static_cast<double>(a[i]) * pw[i * stride + a[i] - 1];
      for (int j = 0; j < dim; ++j)
        if (j != i) partial *= pw[j * stride + a[j]];
      grad[i] += partial;
    }
  }
  return sum;
}

HomPoly HomPoly::scaled(double factor) const {
  HomPoly out = *this;
  for (auto& c : out.coeffs) c *= factor;
  return out;
}

std::vector<std::vector<int>> multi_indices(int d, int k) {
  std::vector<std::vector<int>> out;
  if (d == 1) return {{k}};
  for (int first = k; first >= 0; --first)
    for (auto rest : multi_indices(d - 1, k - first)) {
      rest.insert(rest.begin(), first);
      out.push_back(std::move(rest));
    }
  return out;
}

double monomial_l2_squared(const std::vector<int>& alpha) {
  const double d = static_cast<double>(alpha.size());
  double k = 0, log_fact = 0;
  for (int a : alpha) {
    k += a;
    log_fact += std::lgamma(a + 1.0);
  }
  return std::exp(std::lgamma(d) + log_fact - std::lgamma(d + k));
}

double l2_norm_sphere(const HomPoly& poly) {
  double sum = 0;
  for (std::size_t m = 0; m < poly.alphas.size(); ++m)
    sum += std::norm(poly.coeffs[m]) * monomial_l2_squared(poly.alphas[m]);
  return std::sqrt(sum);
}

HomPoly random_rw_poly(int d, int k, std::uint64_t seed) {
  if (d < 2 || d > 3) throw RangeError("random_rw_poly supports d = 2 or 3");
  if (k < 1 || k > kMaxBallDegree) throw RangeError("degree must lie in [1, 128]");
  HomPoly poly;
  poly.dim = d;
  poly.degree = k;
  poly.alphas = multi_indices(d, k);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(k)};
  std::mt19937_64 gen(seq);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  // |c_alpha| = 1 / |z^alpha|_2 makes E|W(zeta)|^2 constant on the sphere
  for (const auto& a : poly.alphas)
    poly.coeffs.push_back(std::polar(1.0 / std::sqrt(monomial_l2_squared(a)), phase(gen)));
  return poly.scaled(1.0 / sup_norm_sphere(poly));
}

Point sphere_point(const double* u, int d) {
  Point z(d);
  for (int i = 0; i < d; ++i) {
    const double u0 = std::clamp(u[2 * i], 1e-300, 1.0);
    const double rad = std::sqrt(-2.0 * std::log(u0));
    z[i] = std::polar(rad, 2.0 * kPi * u[2 * i + 1]);
  }
  normalize(z);
  return z;
}

namespace {

// Additive recurrence with the generalized golden ratio of dimension D.
std::vector<double> kronecker_alpha(int D) {
  double g = 1.5;
  for (int it = 0; it < 100; ++it) {
    const double f = std::pow(g, D + 1) - g - 1;
    const double df = (D + 1) * std::pow(g, D) - 1;
    g -= f / df;
  }
  std::vector<double> alpha(D);
  double inv = 1;
  for (int j = 0; j < D; ++j) {
    inv /= g;
    alpha[j] = inv - std::floor(inv);
  }
  return alpha;
}

double ascend(const SphereFunction& f, Point z) {
  Point grad;
  double value = std::abs(f(z, nullptr));
  double eta = 0.1;
  for (int it = 0; it < 500 && eta > 1e-13; ++it) {
    const Complex fz = f(z, &grad);
    // steepest ascent of |f|^2 is conj(f'(z)) f(z); drop the radial part
    Point dir(z.size());
    double re_dot = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      dir[i] = fz * std::conj(grad[i]);
      re_dot += std::real(dir[i] * std::conj(z[i]));
    }
    double dnorm = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      dir[i] -= re_dot * z[i];
      dnorm += std::norm(dir[i]);
    }
    dnorm = std::sqrt(dnorm);
    if (dnorm == 0) break;
    Point trial(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + (eta / dnorm) * dir[i];
    normalize(trial);
    const double tv = std::abs(f(trial, nullptr));
    if (tv > value) {
      value = tv;
      z = std::move(trial);
      eta *= 1.5;
    } else {
      eta *= 0.5;
    }
  }
  return value;
}

}  // namespace

double sup_search_sphere(const SphereFunction& f, int d, std::size_t budget) {
  if (budget < 1000) throw ParameterError("sup search budget must be at least 1000");
  const int D = 2 * d;
  const auto alpha = kronecker_alpha(D);
  constexpr std::size_t kStarts = 8;
  const std::size_t chunk = 4096;
  const std::size_t chunks = (budget + chunk - 1) / chunk;

  struct Candidate {
    double value;
    std::size_t index;
  };
  auto point_at = [&](std::size_t i) {
    std::vector<double> u(D);
    for (int j = 0; j < D; ++j) {
      const double x = 0.5 + static_cast<double>(i + 1) * alpha[j];
      u[j] = x - std::floor(x);
    }
    return sphere_point(u.data(), d);
  };
  auto better = [](const Candidate& a, const Candidate& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
  };

  std::vector<std::vector<Candidate>> best(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    auto& list = best[c];
    for (std::size_t i = c * chunk; i < std::min(budget, (c + 1) * chunk); ++i) {
      list.push_back({std::abs(f(point_at(i), nullptr)), i});
      std::sort(list.begin(), list.end(), better);
      if (list.size() > kStarts) list.pop_back();
    }
  });
  std::vector<Candidate> all;
  for (const auto& list : best) all.insert(all.end(), list.begin(), list.end());
  std::sort(all.begin(), all.end(), better);
  if (all.size() > kStarts) all.resize(kStarts);

  std::vector<double> refined(all.size());
  parallel_for(all.size(), [&](std::size_t i) { refined[i] = ascend(f, point_at(all[i].index)); });
  double top = 0;
  for (std::size_t i = 0; i < all.size(); ++i) top = std::max({top, all[i].value, refined[i]});
  return top;
}

double sup_norm_sphere(const HomPoly& poly, std::size_t budget) {
  return sup_search_sphere(
      [&](const Point& z, Point* grad) { return grad ? poly.eval(z, *grad) : poly.eval(z); }, poly.dim, budget);
}

double RWCertificate::delta_min() const {
  double m = 1;
  for (const auto& e : entries) m = std::min(m, e.delta);
  return m;
}

RWEntry rw_entry(const HomPoly& poly, std::size_t budget) {
  RWEntry e;
  e.k = poly.degree;
  e.sup_estimate = sup_norm_sphere(poly, budget);
  e.l2 = l2_norm_sphere(poly);
  e.delta = e.l2 / e.sup_estimate;
  return e;
}

Complex BallSeries::eval(const Point& z) const {
  Complex sum = std::exp(log_const);
  for (const auto& t : terms) sum += std::exp(t.log_a) * t.poly.eval(z);
  return std::exp(log_norm) * sum;
}

Complex BallSeries::eval(const Point& z, Point& grad) const {
  Complex sum = std::exp(log_const);
  grad.assign(dim, 0);
  Point g;
  const double norm = std::exp(log_norm);
  for (const auto& t : terms) {
    const double a = std::exp(t.log_a);
    sum += a * t.poly.eval(z, g);
    for (int i = 0; i < dim; ++i) grad[i] += norm * a * g[i];
  }
  return norm * sum;
}

GapSeries BallSeries::coefficient_series() const {
  GapSeries gs;
  gs.dim = dim;
  gs.log_const = log_const;
  gs.r0_certified = r0_certified;
  gs.log_norm = log_norm;
  for (const auto& t : terms) gs.terms.push_back({t.n, t.log_a});
  return gs;
}

BallSeries theorem1_series_ball(const LogWeight& w, int d, std::uint64_t seed,
                                const BallOptions& options) {
  if (d < 2 || d > 3) throw RangeError("ball series support d = 2 or 3; use d = 1 mode otherwise");
  if (!(options.r_max > 0 && options.r_max < 1)) throw ParameterError("r_max must lie in (0,1)");
  SynthesisOptions synth;
  synth.selection.s_end = std::log(options.r_max);
  synth.grid_j_max = 1;
  while (dyadic_radius(synth.grid_j_max) < options.r_max) ++synth.grid_j_max;
  const GapSeries gs = theorem1_series(w, synth);

  BallSeries F;
  F.dim = d;
  F.log_const = gs.log_const;
  F.r0_certified = gs.r0_certified;
  F.log_norm = gs.log_norm;
  F.seed = seed;
  for (const auto& t : gs.terms)
    if (t.n > kMaxBallDegree)
      throw RangeError("ball series needs degree " + std::to_string(t.n) +
                       " > 128; use d = 1 mode or a smaller r_max");
  F.terms.resize(gs.terms.size());
  F.certificate.entries.resize(gs.terms.size());
  for (std::size_t k = 0; k < gs.terms.size(); ++k) {
    const int n = static_cast<int>(gs.terms[k].n);
    F.terms[k] = {gs.terms[k].n, gs.terms[k].log_a, random_rw_poly(d, n, seed)};
    F.certificate.entries[k] = rw_entry(F.terms[k].poly, options.sup_budget);
  }
  return F;
}

double m2_exact_ball(const BallSeries& F, double r) {
  if (!(r >= 0 && r < 1)) throw RangeError("radius must lie in [0, 1)");
  std::vector<double> logs{2.0 * F.log_const};
  if (r > 0)
    for (const auto& t : F.terms)
      logs.push_back(2.0 * (t.log_a + std::log(l2_norm_sphere(t.poly)) + t.n * std::log(r)));
  return F.log_norm + 0.5 * logsumexp(logs);
}

void for_each_sphere_sample(int d, std::size_t m, std::uint64_t seed,
                            const std::function<void(std::size_t, const Point&)>& body) {
  const std::size_t shards = (m + kShardSize - 1) / kShardSize;
  parallel_for(shards, [&](std::size_t shard) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal;
    Point z(d);
    for (std::size_t i = shard * kShardSize; i < std::min(m, (shard + 1) * kShardSize); ++i) {
      for (int j = 0; j < d; ++j) {
        const double re = normal(gen);
        z[j] = {re, normal(gen)};
      }
      normalize(z);
      body(i, z);
    }
  });
}

MonteCarloMean mp_sphere_sampled(const BallSeries& F, double p, double r,
                                 std::size_t m, std::uint64_t seed) {
  if (!(p > 0)) throw ParameterError("mean exponent must be positive");
  if (!(r >= 0 && r < 1)) throw RangeError("radius must lie in [0, 1)");
  if (m < 10'000) throw ParameterError("Monte Carlo sphere means need at least 10^4 samples");

  MonteCarloMean out;
  out.samples = m;
  std::vector<double> logs{F.log_const};
  for (const auto& t : F.terms)
    if (r > 0) logs.push_back(t.log_a + t.n * std::log(r));
  out.log_scale = F.log_norm + logsumexp(logs);

  if (p == kInf) {
    const double sup = sup_search_sphere(
        [&](const Point& z, Point* grad) {
          Point rz(z.size());
          for (std::size_t i = 0; i < z.size(); ++i) rz[i] = r * z[i];
          if (!grad) return F.eval(rz);
          const Complex v = F.eval(rz, *grad);
          for (auto& g : *grad) g *= r;
          return v;
        },
        F.dim);
    out.log_value = std::log(sup);
    out.mean = std::exp(out.log_value - out.log_scale);
    return out;
  }

  std::vector<double> x(m);
  for_each_sphere_sample(F.dim, m, seed, [&](std::size_t i, const Point& zeta) {
    Point rz(zeta.size());
    for (std::size_t j = 0; j < zeta.size(); ++j) rz[j] = r * zeta[j];
    x[i] = std::pow(std::abs(F.eval(rz)) / std::exp(out.log_scale), p);
  });
  double sum = 0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(m);
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(m - 1);
  out.mean = mean;
  out.mean_se = std::sqrt(var / static_cast<double>(m));
  out.log_value = out.log_scale + std::log(mean) / p;
  out.std_error = out.mean_se / (mean * p);
  return out;
}

InnerProductEstimate mc_inner_product(const HomPoly& a, const HomPoly& b,
                                      std::size_t m, std::uint64_t seed) {
  if (a.dim != b.dim) throw InputError("polynomials live in different dimensions");
  if (m < 2) throw ParameterError("need at least 2 samples");
  std::vector<Complex> x(m);
  for_each_sphere_sample(a.dim, m, seed, [&](std::size_t i, const Point& z) {
    x[i] = a.eval(z) * std::conj(b.eval(z));
  });
  Complex sum = 0;
  for (const auto& v : x) sum += v;
  const Complex mean = sum / static_cast<double>(m);
  double var = 0;
  for (const auto& v : x) var += std::norm(v - mean);
  var /= static_cast<double>(m - 1);
  return {mean, std::sqrt(var / static_cast<double>(m))};
}

}  // namespace gapmeans

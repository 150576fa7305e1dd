#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gapmeans/error.hpp"
#include "gapmeans/io.hpp"
#include "gapmeans/parallel.hpp"

using namespace gapmeans;

namespace {

enum ExitCode : int {
  kPass = 0,
  kFail = 1,
  kInputError = 2,
  kConstructionError = 3,
  kResolutionError = 4,
};

struct Options {
  RunConfig config;
  std::string mode = "auto";
  std::string weight;
  std::string series_path;
  std::string out;
  std::string radii_text;
  std::string p_text = "2";
  double q = 2;
  int d = 1;
  std::string v_spec, w_spec, u_spec;
  std::optional<double> alpha;
  std::string profile_path;
  double tol = 1e-7;
  double r_max = 0.95;
  std::size_t mc_samples = 0;
  std::string mc_radii = "0.5,0.9";
  std::string rw_csv;
  int rw_table = 0;
  std::string seeds = "0,1,2,3,4";
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GAPMEANS_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    throw ParameterError(std::string("GAPMEANS_THREADS must be a positive integer: ") + env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--threads", o.config.threads, "worker threads (default: GAPMEANS_THREADS or all cores)");
  cmd->add_option("--seed", o.config.seed, "random seed");
  cmd->add_option("--out", o.out, "output path");
}

void add_grid(CLI::App* cmd, Options& o) {
  cmd->add_option("--jmax", o.config.j_max, "dyadic grid r_j = 1 - 2^-j, j = 0..jmax");
  cmd->add_option("--r,--radii", o.radii_text, "explicit radii (comma separated)");
}

void add_mode(CLI::App* cmd, Options& o) {
  cmd->add_option("--mode", o.mode, "sampled | auto | bounds")->check(CLI::IsMember({"sampled", "auto", "bounds"}));
}

// Explicit radii replace the dyadic grid; r = 1 - 2^-j grid otherwise.
std::vector<double> grid_radii(Options& o, bool positive_only = false) {
  std::vector<double> radii;
  if (!o.radii_text.empty()) {
    o.config.extra_radii = parse_real_list(o.radii_text);
    o.config.j_max = -1;
    radii = o.config.extra_radii;
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  } else {
    if (o.config.j_max < 0) throw ParameterError("--jmax must be >= 0");
    radii = o.config.radii();
  }
  if (positive_only) std::erase_if(radii, [](double r) { return r <= 0; });
  for (double r : radii)
    if (!(r >= 0 && r < 1)) throw RangeError("radii must lie in [0, 1)");
  return radii;
}

std::string p_label(double p) { return std::isinf(p) ? "inf" : format_number(p); }

Json with_config(Json j, const RunConfig& config) {
  j["run_config"] = to_json(config);
  return j;
}

// Writes JSON to --out when given, otherwise to stdout.
void emit_json(const Options& o, const Json& j) {
  if (o.out.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(o.out, j);
}

void emit_csv(const Options& o, const std::function<void(std::ostream&)>& body) {
  std::ostringstream text;
  write_config_comment(text, o.config);
  body(text);
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(o.out);
    if (!f) throw InputError("cannot write " + o.out);
    f << text.str();
  }
}

GapSeries load_series(const Options& o) {
  if (o.series_path.empty()) throw ParameterError("--series is required");
  return series_from_json(read_json_file(o.series_path));
}

void start(Options& o, const std::string& command) {
  o.config.command = command;
  o.config.weight = o.weight;
  o.config.policy = parse_mode_policy(o.mode);
  o.config.threads = resolve_threads(o.config.threads);
  set_thread_count(o.config.threads);
  if (!o.out.empty()) o.config.outputs = {o.out};
}

int cmd_synthesize(Options& o) {
  start(o, "synthesize");
  const LogWeight w = parse_weight_spec(o.weight);
  SynthesisOptions options;
  options.grid_j_max = o.config.j_max;
  const GapSeries gs = theorem1_series(w, options);
  if (o.out.empty()) o.out = "series.json", o.config.outputs = {o.out};
  write_json_file(o.out, with_config(to_json(gs), o.config));
  std::cout << "terms " << gs.terms.size() << "\n"
            << "r0_certified " << format_number(gs.r0_certified) << "\n";
  if (gs.r0_certified > 0.9) std::cout << "warning: r0_certified exceeds 0.9\n";
  return kPass;
}

int cmd_verify(Options& o) {
  start(o, "verify");
  const LogWeight w = parse_weight_spec(o.weight);
  const auto ps = parse_real_list(o.p_text);
  o.config.params = {{"p", o.p_text}};
  const auto radii = grid_radii(o);
  const Theorem1Result res = [&] {
    if (!o.series_path.empty()) return theorem1_verify(load_series(o), w, ps, radii, o.config.policy);
    SynthesisOptions options;
    options.grid_j_max = std::max(o.config.j_max, 0);
    return theorem1_verify(w, ps, radii, o.config.policy, options);
  }();

  bool pass = true;
  Json reports = Json::array();
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const auto& rep = res.reports[i];
    pass = pass && rep.pass;
    reports.push_back(to_json(rep));
    std::cout << "p=" << p_label(ps[i]) << " log_C [" << format_number(rep.log_C_lower) << ", "
              << format_number(rep.log_C_upper) << "] " << (rep.pass ? "pass" : "FAIL") << "\n";
  }
  const LemmaCertificate lc = lemma_certificate(res.series, w);
  pass = pass && lc.pass;
  std::cout << "lemma certificate " << (lc.pass ? "pass" : "FAIL") << "\n";

  Json j;
  j["pass"] = pass;
  j["series"] = to_json(res.series);
  j["reports"] = reports;
  j["lemma_certificate"] = {{"minorant_excess", real_to_json(lc.minorant_excess)},
                            {"minorant_pass", lc.minorant_pass},
                            {"log_C1", real_to_json(lc.log_C1)},
                            {"log_C2_dominance", real_to_json(lc.log_C2_dominance)},
                            {"log_C2_circle", real_to_json(lc.log_C2_circle)},
                            {"log_C3", real_to_json(lc.log_C3)},
                            {"theta_min", real_to_json(lc.theta_min)},
                            {"grid_points", lc.grid_points},
                            {"pass", lc.pass}};
  if (o.out.empty()) o.out = "report.json", o.config.outputs = {o.out};
  write_json_file(o.out, with_config(j, o.config));
  return pass ? kPass : kFail;
}

void print_profile(const MeansProfile& prof, const std::string& label) {
  for (const auto& pt : prof.grid)
    std::cout << label << "(" << format_number(pt.r) << ") = " << format_number(std::exp(pt.log_value))
              << "  log " << format_number(pt.log_value) << "  " << to_string(pt.mode) << "\n";
}

int cmd_means(Options& o) {
  start(o, "means");
  const GapSeries gs = load_series(o);
  const auto ps = parse_real_list(o.p_text);
  o.config.params = {{"p", o.p_text}, {"series", o.series_path}};
  const auto radii = grid_radii(o);
  const auto profiles = sphere_profiles(gs, ps, radii, o.config.policy);
  for (std::size_t i = 0; i < ps.size(); ++i) print_profile(profiles[i], "M_" + p_label(ps[i]));
  if (!o.out.empty()) {
    // one file per exponent: out.csv -> out_p0.5.csv, out_pinf.csv, ...
    const std::string base = o.out;
    const auto dot = base.find_last_of('.');
    const bool split = ps.size() > 1;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (split)
        o.out = dot == std::string::npos ? base + "_p" + p_label(ps[i])
                                         : base.substr(0, dot) + "_p" + p_label(ps[i]) + base.substr(dot);
      emit_csv(o, [&](std::ostream& out) { write_profile_csv(out, profiles[i]); });
    }
    o.out = base;
  }
  return kPass;
}

int cmd_volume(Options& o) {
  start(o, "volume");
  const GapSeries gs = load_series(o);
  o.config.params = {{"q", format_number(o.q)}, {"d", std::to_string(o.d)}, {"series", o.series_path}};
  const auto prof = volume_profile(gs, o.q, o.d, grid_radii(o));
  print_profile(prof, "V_" + format_number(o.q));
  if (!o.out.empty()) emit_csv(o, [&](std::ostream& out) { write_profile_csv(out, prof); });
  return kPass;
}

RadialDensity density_from(const Options& o) {
  if (!o.u_spec.empty() + !o.v_spec.empty() + o.alpha.has_value() > 1)
    throw ParameterError("give at most one of --u, --v, --alpha");
  if (!o.u_spec.empty()) return RadialDensity::from_weight(parse_weight_spec(o.u_spec));
  if (!o.v_spec.empty()) return RadialDensity::reciprocal(parse_weight_spec(o.v_spec));
  if (o.alpha) return RadialDensity::one_minus_t2_pow(*o.alpha);
  return RadialDensity::unit();
}

int cmd_weighted(Options& o) {
  start(o, "weighted");
  o.config.params = {{"q", format_number(o.q)}, {"d", std::to_string(o.d)}};
  if (o.series_path.empty()) {
    // synthesize from (v, w) and check M_{q,1/v} against w
    if (o.v_spec.empty() || o.w_spec.empty())
      throw ParameterError("weighted needs --series, or --v and --w to synthesize");
    o.config.params.push_back({"v", o.v_spec});
    o.config.params.push_back({"w", o.w_spec});
    const auto res = proposition_pipeline(parse_weight_spec(o.v_spec), parse_weight_spec(o.w_spec),
                                          o.q, o.d, grid_radii(o));
    print_profile(res.profile, "M_q,1/v");
    std::cout << "log_C [" << format_number(res.report.log_C_lower) << ", "
              << format_number(res.report.log_C_upper) << "] " << (res.report.pass ? "pass" : "FAIL")
              << "\n";
    Json j = to_json(res.report);
    j["series"] = to_json(res.series);
    if (o.out.empty()) o.out = "report.json", o.config.outputs = {o.out};
    write_json_file(o.out, with_config(j, o.config));
    return res.report.pass ? kPass : kFail;
  }
  const GapSeries gs = load_series(o);
  const RadialDensity u = density_from(o);
  o.config.params.push_back({"series", o.series_path});
  o.config.params.push_back({"u", u.name});
  const auto prof = weighted_profile(gs, o.q, o.d, u, grid_radii(o));
  print_profile(prof, "M_q,u");
  if (!o.out.empty()) emit_csv(o, [&](std::ostream& out) { write_profile_csv(out, prof); });
  return kPass;
}

int cmd_convexity(Options& o) {
  start(o, "convexity");
  if (o.profile_path.empty()) throw ParameterError("--profile is required");
  o.config.params = {{"profile", o.profile_path}, {"tol", format_number(o.tol)}};
  auto curve = read_profile_csv(o.profile_path);
  std::erase_if(curve, [](const CurvePoint& c) { return c.r <= 0; });
  const ConvexityReport rep = check_log_convexity(curve, o.tol);
  std::cout << "max_defect " << format_number(rep.max_defect) << "\n"
            << "worst_r " << format_number(curve[rep.worst_index].r) << "\n"
            << (rep.pass ? "pass" : "FAIL") << "\n";
  if (!o.out.empty()) emit_json(o, with_config(to_json(rep), o.config));
  return rep.pass ? kPass : kFail;
}

int cmd_envelope(Options& o) {
  start(o, "envelope");
  const LogWeight w = parse_weight_spec(o.weight);
  const int j = std::max(o.config.j_max, 1);
  const NewtonEnvelope env = build_envelope(w, covering_slope(w, dyadic_log_radius(j)));
  std::cerr << "lines " << env.lines().size() << "\n";
  emit_csv(o, [&](std::ostream& out) { write_envelope_csv(out, env); });
  return kPass;
}

int cmd_rw_table(Options& o) {
  const auto seeds = parse_real_list(o.seeds);
  o.config.params = {{"d", std::to_string(o.d)}, {"kmax", std::to_string(o.rw_table)}, {"seeds", o.seeds}};
  std::ostringstream rows;
  double delta_min = 1;
  rows << "seed,k,sup_estimate,l2,delta\n";
  for (double s : seeds)
    for (int k = 1; k <= o.rw_table; ++k) {
      const RWEntry e = rw_entry(random_rw_poly(o.d, k, static_cast<std::uint64_t>(s)));
      delta_min = std::min(delta_min, e.delta);
      rows << static_cast<std::uint64_t>(s) << ',' << e.k << ',' << format_number(e.sup_estimate) << ','
           << format_number(e.l2) << ',' << format_number(e.delta) << '\n';
    }
  std::cout << "delta_min " << format_number(delta_min) << "\n";
  emit_csv(o, [&](std::ostream& out) { out << rows.str(); });
  return kPass;
}

int cmd_multidim(Options& o) {
  start(o, "multidim");
  if (o.rw_table > 0) return cmd_rw_table(o);
  const LogWeight w = parse_weight_spec(o.weight);
  o.config.params = {{"d", std::to_string(o.d)}, {"r_max", format_number(o.r_max)}};
  BallOptions options;
  options.r_max = o.r_max;
  const BallSeries F = theorem1_series_ball(w, o.d, o.config.seed, options);

  EquivalenceReport rep;
  rep.pipeline = "multidim_m2";
  rep.params = {{"w", w.describe()}, {"d", std::to_string(o.d)}, {"seed", std::to_string(o.config.seed)}};
  rep.log_C_lower = kInf;
  rep.log_C_upper = kNegInf;
  std::vector<double> radii = grid_radii(o);
  std::erase_if(radii, [&](double r) { return r > o.r_max; });
  if (radii.empty() || radii.back() < o.r_max) radii.push_back(o.r_max);
  for (double r : radii) {
    const double lr = m2_exact_ball(F, r) - w.log_w(r);
    rep.grid.push_back({r, lr, lr, lr, Mode::exact});
    rep.log_C_lower = std::min(rep.log_C_lower, lr);
    rep.log_C_upper = std::max(rep.log_C_upper, lr);
  }
  rep.pass = std::isfinite(rep.log_C_lower) && std::isfinite(rep.log_C_upper);
  std::cout << "terms " << F.terms.size() << "  delta_min " << format_number(F.certificate.delta_min())
            << "\nM_2/w log_C [" << format_number(rep.log_C_lower) << ", "
            << format_number(rep.log_C_upper) << "] " << (rep.pass ? "pass" : "FAIL") << "\n";

  Json j;
  j["ball_series"] = to_json(F);
  j["report"] = to_json(rep);
  bool pass = rep.pass;
  if (o.mc_samples > 0) {
    Json mc = Json::array();
    for (double r : parse_real_list(o.mc_radii)) {
      const MonteCarloMean m = mp_sphere_sampled(F, 2.0, r, o.mc_samples, o.config.seed);
      const double exact = m2_exact_ball(F, r);
      const double z = std::abs(std::exp(2 * (exact - m.log_scale)) - m.mean) / m.mean_se;
      const bool ok = z <= 3;
      pass = pass && ok;
      mc.push_back({{"r", r}, {"log_m2_exact", exact}, {"log_m2_mc", m.log_value},
                    {"std_errors", z}, {"pass", ok}});
      std::cout << "MC r=" << format_number(r) << " exact " << format_number(exact) << " mc "
                << format_number(m.log_value) << " (" << format_number(z) << " SE)\n";
    }
    j["monte_carlo"] = mc;
  }
  j["pass"] = pass;
  if (!o.rw_csv.empty()) {
    std::ofstream f(o.rw_csv);
    if (!f) throw InputError("cannot write " + o.rw_csv);
    write_config_comment(f, o.config);
    write_rw_csv(f, F.certificate);
  }
  if (o.out.empty()) o.out = "ball.json", o.config.outputs = {o.out};
  write_json_file(o.out, with_config(j, o.config));
  return pass ? kPass : kFail;
}

int cmd_demo_alpha(Options& o) {
  start(o, "demo-alpha");
  const GapSeries gs = o.series_path.empty() ? GapSeries{} : load_series(o);
  const double alpha = o.alpha.value_or(1.0);
  const double p = parse_real_list(o.p_text).front();
  o.config.params = {{"p", p_label(p)}, {"alpha", format_number(alpha)}, {"d", std::to_string(o.d)},
                     {"series", o.series_path.empty() ? "1" : o.series_path}};
  std::vector<double> radii;
  if (o.radii_text.empty())
    for (int i = 1; i <= 19; ++i) radii.push_back(0.05 * i);
  else
    radii = grid_radii(o, true);
  const AlphaDemo demo = alpha_weighted_demo(gs, p, alpha, o.d, radii);
  std::cout << "max_defect " << format_number(demo.convexity.max_defect) << "\n"
            << (demo.convexity.pass ? "log-convex on this grid" : "not log-convex") << "\n";
  Json j = to_json(demo.convexity);
  Json grid = Json::array();
  for (const auto& pt : demo.profile.grid)
    grid.push_back({{"r", pt.r}, {"log_value", pt.log_value}, {"mode", to_string(pt.mode)}});
  j["profile"] = grid;
  if (!o.out.empty()) emit_json(o, with_config(j, o.config));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lacunary series with prescribed integral means"};
  app.require_subcommand(1);
  Options o;
  std::function<int()> run;

  auto* synth = app.add_subcommand("synthesize", "build a lacunary series for a weight");
  add_common(synth, o);
  synth->add_option("--weight", o.weight, "weight spec")->required();
  synth->add_option("--jmax", o.config.j_max, "certification grid depth");
  synth->callback([&] { run = [&] { return cmd_synthesize(o); }; });

  auto* verify = app.add_subcommand("verify", "check M_p(f, r) / w(r) on the grid");
  add_common(verify, o);
  add_grid(verify, o);
  add_mode(verify, o);
  verify->add_option("--weight", o.weight, "weight spec")->required();
  verify->add_option("--p", o.p_text, "exponents, e.g. 0.5,1,2,inf");
  verify->add_option("--series", o.series_path, "use this series instead of synthesizing");
  verify->callback([&] { run = [&] { return cmd_verify(o); }; });

  auto* means = app.add_subcommand("means", "sphere means M_p(f, r)");
  add_common(means, o);
  add_grid(means, o);
  add_mode(means, o);
  means->add_option("--series", o.series_path, "series JSON")->required();
  means->add_option("--p", o.p_text, "exponents");
  means->callback([&] { run = [&] { return cmd_means(o); }; });

  auto* volume = app.add_subcommand("volume", "volume means V_q(f, r) on the ball in C^d");
  add_common(volume, o);
  add_grid(volume, o);
  volume->add_option("--series", o.series_path, "series JSON")->required();
  volume->add_option("--q", o.q, "exponent");
  volume->add_option("--d", o.d, "dimension");
  volume->callback([&] { run = [&] { return cmd_volume(o); }; });

  auto* weighted = app.add_subcommand("weighted", "weighted volume means M_{q,u}(f, r)");
  add_common(weighted, o);
  add_grid(weighted, o);
  weighted->add_option("--series", o.series_path, "series JSON");
  weighted->add_option("--q", o.q, "exponent");
  weighted->add_option("--d", o.d, "dimension");
  weighted->add_option("--u", o.u_spec, "density u given as a weight spec");
  weighted->add_option("--v", o.v_spec, "density u = 1/v");
  weighted->add_option("--w", o.w_spec, "target weight; synthesizes f when --series is absent");
  weighted->add_option("--alpha", o.alpha, "density u = (1 - t^2)^alpha");
  weighted->callback([&] { run = [&] { return cmd_weighted(o); }; });

  auto* convexity = app.add_subcommand("convexity", "log-convexity of a profile CSV in log r");
  add_common(convexity, o);
  convexity->add_option("--profile", o.profile_path, "CSV with r,log_value columns")->required();
  convexity->add_option("--tol", o.tol, "allowed defect");
  convexity->callback([&] { run = [&] { return cmd_convexity(o); }; });

  auto* envelope = app.add_subcommand("envelope", "dump the Newton envelope of a weight");
  add_common(envelope, o);
  envelope->add_option("--weight", o.weight, "weight spec")->required();
  envelope->add_option("--jmax", o.config.j_max, "cover the weight up to r = 1 - 2^-jmax");
  envelope->callback([&] { run = [&] { return cmd_envelope(o); }; });

  auto* multidim = app.add_subcommand("multidim", "ball series in C^d from random homogeneous polynomials");
  add_common(multidim, o);
  add_grid(multidim, o);
  multidim->add_option("--weight", o.weight, "weight spec");
  multidim->add_option("--d", o.d, "dimension (2 or 3)");
  multidim->add_option("--rmax", o.r_max, "largest radius covered");
  multidim->add_option("--mc", o.mc_samples, "Monte Carlo samples for the M_2 check (0 = skip)");
  multidim->add_option("--mc-radii", o.mc_radii, "radii of the Monte Carlo check");
  multidim->add_option("--rw-csv", o.rw_csv, "write the polynomial certificate as CSV");
  multidim->add_option("--rw-table", o.rw_table, "tabulate delta_k for k = 1..K over --seeds instead");
  multidim->add_option("--seeds", o.seeds, "seeds for --rw-table");
  multidim->callback([&] { run = [&] { return cmd_multidim(o); }; });

  auto* alpha = app.add_subcommand("demo-alpha", "(1 - |z|^2)^alpha weighted means and their log-convexity");
  add_common(alpha, o);
  alpha->add_option("--series", o.series_path, "series JSON (default f = 1)");
  alpha->add_option("--p", o.p_text, "exponent");
  alpha->add_option("--alpha", o.alpha, "density exponent");
  alpha->add_option("--d", o.d, "dimension");
  alpha->add_option("--r,--radii", o.radii_text, "radii (default 0.05, 0.10, ..., 0.95)");
  alpha->callback([&] { run = [&] { return cmd_demo_alpha(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    return run();
  } catch (const ConstructionError& e) {
    std::cerr << "construction error at r = " << format_number(e.radius()) << ": " << e.what() << "\n";
    return kConstructionError;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return kResolutionError;
  } catch (const AccuracyError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return kResolutionError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

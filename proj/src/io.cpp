#include "gapmeans/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gapmeans/error.hpp"

namespace gapmeans {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return kNegInf;
  double value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParameterError("cannot parse " + what + ": '" + text + "'");
  return value;
}

using KeyValues = std::map<std::string, double>;

KeyValues parse_key_values(const std::string& text, const std::string& family) {
  KeyValues kv;
  if (trim(text).empty()) return kv;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ParameterError("weight spec " + family + ": expected key=value, got '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    if (kv.count(key)) throw ParameterError("weight spec " + family + ": repeated key " + key);
    kv[key] = parse_real(item.substr(eq + 1), family + " parameter " + key);
  }
  return kv;
}

double take(KeyValues& kv, const std::string& key, const std::string& family) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParameterError("weight spec " + family + " needs " + key + "=");
  const double v = it->second;
  kv.erase(it);
  return v;
}

void require_consumed(const KeyValues& kv, const std::string& family) {
  if (!kv.empty())
    throw ParameterError("weight spec " + family + ": unknown key " + kv.begin()->first);
}

Exponent exponent_from_json(const Json& j) {
  const double n = j.is_number_unsigned() ? static_cast<double>(j.get<std::uint64_t>())
                                          : j.get<double>();
  if (!is_valid_exponent(n)) throw InputError("series term has an invalid exponent");
  return n;
}

Json exponent_to_json(Exponent n) {
  if (n < 0x1p63) return static_cast<std::uint64_t>(n);
  return n;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string("JSON input lacks field '") + key + "'");
  return j.at(key);
}

}  // namespace

LogWeight parse_weight_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ParameterError("weight spec needs the form family:params, got '" + spec + "'");
  const std::string family = trim(spec.substr(0, colon));
  const std::string rest = spec.substr(colon + 1);
  if (family == "samples") {
    if (trim(rest).empty()) throw ParameterError("samples weight needs a CSV path");
    return weight_from_samples(read_samples_csv(trim(rest)));
  }
  KeyValues kv = parse_key_values(rest, family);
  if (family == "power") {
    const double alpha = take(kv, "alpha", family);
    require_consumed(kv, family);
    return make_power_weight(alpha);
  }
  if (family == "exp") {
    const double c = take(kv, "c", family);
    const double beta = take(kv, "beta", family);
    require_consumed(kv, family);
    return make_exp_weight(c, beta);
  }
  if (family == "log") {
    const double gamma = take(kv, "gamma", family);
    require_consumed(kv, family);
    return make_log_weight(gamma);
  }
  if (family == "const") {
    const double A = take(kv, "A", family);
    require_consumed(kv, family);
    return make_constant_weight(A);
  }
  throw ParameterError("unknown weight family '" + family + "'");
}

std::vector<SamplePoint> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file " + path);
  std::string line;
  bool header = false;
  std::size_t col_r = 0, col_w = 1;
  std::vector<SamplePoint> samples;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    if (!header) {
      const auto r = std::find(cells.begin(), cells.end(), "r");
      const auto w = std::find(cells.begin(), cells.end(), "log_w");
      if (r == cells.end() || w == cells.end())
        throw InputError("sample file " + path + " needs a header with columns r,log_w");
      col_r = r - cells.begin();
      col_w = w - cells.begin();
      header = true;
      continue;
    }
    if (cells.size() <= std::max(col_r, col_w))
      throw InputError("short row in sample file " + path + ": '" + t + "'");
    try {
      samples.push_back({parse_real(cells[col_r], "r"), parse_real(cells[col_w], "log_w")});
    } catch (const ParameterError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  if (!header) throw InputError("sample file " + path + " is empty");
  return samples;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item, "number list"));
  if (out.empty()) throw ParameterError("empty number list");
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> RunConfig::radii() const {
  std::vector<double> r = dyadic_grid(j_max);
  r.insert(r.end(), extra_radii.begin(), extra_radii.end());
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

Json to_json(const RunConfig& config) {
  Json j;
  j["command"] = config.command;
  j["weight"] = config.weight;
  j["j_max"] = config.j_max;
  Json extra = Json::array();
  for (double r : config.extra_radii) extra.push_back(real_to_json(r));
  j["extra_radii"] = extra;
  j["seed"] = config.seed;
  j["mode_policy"] = to_string(config.policy);
  j["threads"] = config.threads;
  Json params = Json::object();
  for (const auto& [k, v] : config.params) params[k] = v;
  j["params"] = params;
  j["outputs"] = config.outputs;
  return j;
}

Json real_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    return parse_real(s, "JSON real");
  }
  throw InputError("expected a number in JSON input");
}

Json to_json(const GapSeries& gs) {
  Json j;
  j["dim"] = gs.dim;
  j["log_const"] = real_to_json(gs.log_const);
  Json terms = Json::array();
  for (const auto& t : gs.terms)
    terms.push_back({{"n", exponent_to_json(t.n)}, {"log_a", real_to_json(t.log_a)}});
  j["terms"] = terms;
  j["r0_certified"] = gs.r0_certified;
  j["log_norm"] = gs.log_norm;
  return j;
}

GapSeries series_from_json(const Json& j) {
  GapSeries gs;
  try {
    gs.dim = field(j, "dim").get<int>();
    gs.log_const = real_from_json(field(j, "log_const"));
    for (const auto& t : field(j, "terms"))
      gs.terms.push_back({exponent_from_json(field(t, "n")), real_from_json(field(t, "log_a"))});
    gs.r0_certified = real_from_json(field(j, "r0_certified"));
    if (j.contains("log_norm")) gs.log_norm = real_from_json(j.at("log_norm"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed series JSON: ") + e.what());
  }
  validate(gs);
  return gs;
}

Json to_json(const HomPoly& poly) {
  Json coeffs = Json::array();
  for (std::size_t i = 0; i < poly.alphas.size(); ++i)
    coeffs.push_back({poly.alphas[i], poly.coeffs[i].real(), poly.coeffs[i].imag()});
  return {{"degree", poly.degree}, {"coeffs", coeffs}};
}

HomPoly poly_from_json(const Json& j, int dim) {
  HomPoly poly;
  poly.dim = dim;
  poly.degree = field(j, "degree").get<int>();
  for (const auto& c : field(j, "coeffs")) {
    if (!c.is_array() || c.size() != 3) throw InputError("poly coefficient must be [alpha, re, im]");
    auto alpha = c[0].get<std::vector<int>>();
    int total = 0;
    for (int a : alpha) total += a;
    if (static_cast<int>(alpha.size()) != dim || total != poly.degree)
      throw InputError("poly multi-index does not match dim and degree");
    poly.alphas.push_back(std::move(alpha));
    poly.coeffs.emplace_back(c[1].get<double>(), c[2].get<double>());
  }
  return poly;
}

Json to_json(const BallSeries& F) {
  Json j;
  j["dim"] = F.dim;
  j["log_const"] = real_to_json(F.log_const);
  Json terms = Json::array();
  for (const auto& t : F.terms)
    terms.push_back({{"n", exponent_to_json(t.n)},
                     {"log_a", real_to_json(t.log_a)},
                     {"poly", to_json(t.poly)}});
  j["terms"] = terms;
  j["r0_certified"] = F.r0_certified;
  j["log_norm"] = F.log_norm;
  j["seed"] = F.seed;
  Json cert = Json::array();
  for (const auto& e : F.certificate.entries)
    cert.push_back({{"k", e.k}, {"sup_estimate", e.sup_estimate}, {"l2", e.l2}, {"delta", e.delta}});
  j["rw_certificate"] = cert;
  return j;
}

BallSeries ball_series_from_json(const Json& j) {
  BallSeries F;
  try {
    F.dim = field(j, "dim").get<int>();
    F.log_const = real_from_json(field(j, "log_const"));
    for (const auto& t : field(j, "terms"))
      F.terms.push_back({exponent_from_json(field(t, "n")), real_from_json(field(t, "log_a")),
                         poly_from_json(field(t, "poly"), F.dim)});
    F.r0_certified = real_from_json(field(j, "r0_certified"));
    if (j.contains("log_norm")) F.log_norm = real_from_json(j.at("log_norm"));
    if (j.contains("seed")) F.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rw_certificate"))
      for (const auto& e : j.at("rw_certificate"))
        F.certificate.entries.push_back({e.at("k").get<int>(), e.at("sup_estimate").get<double>(),
                                         e.at("l2").get<double>(), e.at("delta").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed ball series JSON: ") + e.what());
  }
  return F;
}

Json to_json(const EquivalenceReport& report) {
  Json j;
  j["pipeline"] = report.pipeline;
  Json params = Json::object();
  for (const auto& [k, v] : report.params) params[k] = v;
  j["params"] = params;
  Json grid = Json::array();
  for (const auto& e : report.grid)
    grid.push_back({{"r", e.r},
                    {"log_ratio", real_to_json(e.log_ratio)},
                    {"log_ratio_lo", real_to_json(e.log_ratio_lo)},
                    {"log_ratio_hi", real_to_json(e.log_ratio_hi)},
                    {"mode", to_string(e.mode)}});
  j["grid"] = grid;
  j["log_C_lower"] = real_to_json(report.log_C_lower);
  j["log_C_upper"] = real_to_json(report.log_C_upper);
  j["pass"] = report.pass;
  return j;
}

Json to_json(const ConvexityReport& report) {
  return {{"max_defect", real_to_json(report.max_defect)},
          {"worst_index", report.worst_index},
          {"pass", report.pass}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_config_comment(std::ostream& out, const RunConfig& config) {
  out << "# run_config " << to_json(config).dump() << '\n';
}

void write_profile_csv(std::ostream& out, const MeansProfile& profile) {
  out << "r,log_value,mode,log_uncertainty\n";
  for (const auto& pt : profile.grid)
    out << format_number(pt.r) << ',' << format_number(pt.log_value) << ','
        << to_string(pt.mode) << ',' << format_number(pt.log_uncertainty) << '\n';
}

std::vector<CurvePoint> read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open profile " + path);
  std::string line;
  bool header = false;
  std::size_t col_r = 0, col_v = 1;
  std::vector<CurvePoint> curve;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    if (!header) {
      const auto r = std::find(cells.begin(), cells.end(), "r");
      const auto v = std::find(cells.begin(), cells.end(), "log_value");
      if (r == cells.end() || v == cells.end())
        throw InputError("profile " + path + " needs a header with columns r,log_value");
      col_r = r - cells.begin();
      col_v = v - cells.begin();
      header = true;
      continue;
    }
    if (cells.size() <= std::max(col_r, col_v))
      throw InputError("short row in profile " + path + ": '" + t + "'");
    try {
      curve.push_back({parse_real(cells[col_r], "r"), parse_real(cells[col_v], "log_value")});
    } catch (const ParameterError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  if (!header) throw InputError("profile " + path + " is empty");
  return curve;
}

void write_envelope_csv(std::ostream& out, const NewtonEnvelope& env) {
  out << "n,log_c_n,touch_s\n";
  for (const auto& line : env.lines())
    out << format_number(line.slope) << ',' << format_number(line.log_intercept) << ','
        << format_number(line.touch_s) << '\n';
}

void write_rw_csv(std::ostream& out, const RWCertificate& cert) {
  out << "k,sup_estimate,l2,delta\n";
  for (const auto& e : cert.entries)
    out << e.k << ',' << format_number(e.sup_estimate) << ',' << format_number(e.l2) << ','
        << format_number(e.delta) << '\n';
}

}  // namespace gapmeans

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gapmeans/lacunary.hpp"
#include "gapmeans/means.hpp"
#include "gapmeans/multidim.hpp"
#include "gapmeans/verify.hpp"
#include "gapmeans/weights.hpp"

namespace gapmeans {

using Json = nlohmann::ordered_json;

// power:alpha=2 | exp:c=1,beta=1 | log:gamma=3 | const:A=1 | samples:<csv path>
LogWeight parse_weight_spec(const std::string& spec);

// CSV with header r,log_w; lines starting with '#' are skipped.
std::vector<SamplePoint> read_samples_csv(const std::string& path);

// Comma-separated reals; "inf" accepted.
std::vector<double> parse_real_list(const std::string& text);

// 17 significant digits; inf, -inf and nan spelled out.
std::string format_number(double x);

// Resolved parameters of one CLI invocation, embedded in every output.
struct RunConfig {
  std::string command;
  std::string weight;
  int j_max = 40;
  std::vector<double> extra_radii;
  std::uint64_t seed = 0;
  ModePolicy policy = ModePolicy::automatic;
  unsigned threads = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> outputs;

  // dyadic radii j = 0..j_max merged with the extra radii
  std::vector<double> radii() const;
};

Json to_json(const RunConfig& config);

// Non-finite reals are stored as the strings "inf", "-inf", "nan".
Json real_to_json(double x);
double real_from_json(const Json& j);

Json to_json(const GapSeries& gs);
GapSeries series_from_json(const Json& j);

Json to_json(const HomPoly& poly);
HomPoly poly_from_json(const Json& j, int dim);
Json to_json(const BallSeries& F);
BallSeries ball_series_from_json(const Json& j);

Json to_json(const EquivalenceReport& report);
Json to_json(const ConvexityReport& report);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// '#'-prefixed line holding the compact run config, read back as a comment.
void write_config_comment(std::ostream& out, const RunConfig& config);

void write_profile_csv(std::ostream& out, const MeansProfile& profile);
// r and log_value columns of a profile CSV (other columns ignored).
std::vector<CurvePoint> read_profile_csv(const std::string& path);
void write_envelope_csv(std::ostream& out, const NewtonEnvelope& env);
void write_rw_csv(std::ostream& out, const RWCertificate& cert);

}  // namespace gapmeans

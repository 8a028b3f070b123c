#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlab/error.hpp"
#include "tlab/map_model.hpp"
#include "tlab/orbit_engine.hpp"

namespace tlab {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct AnalysisConfig {
  double tol = 1e-10;
  int max_terms = 2000;
  std::optional<double> escape_radius;  // nullopt = auto
  int probes = 100;
  std::uint64_t seed = 42;
  std::string format = "json";  // json | csv
  std::string space_case = "auto";  // auto | H | NN | ND
  bool assert_non_exceptional = false;
  bool assert_c_compact = false;
  std::vector<double> lambdas{0.0, 0.25, 0.5};
};

// Throws InvalidInput on out-of-range fields.
void validate(const AnalysisConfig& cfg);
json config_to_json(const AnalysisConfig& cfg);

// [re, im]; non-finite parts become null.
json complex_to_json(cd z);
cd complex_from_json(const json& j);

// {"type":"poly","degree":d,"coeffs":[[re,im],...]} (a_1..a_{d-1}) or
// {"type":"rational","sigma":..,"b":..,"P":[..],"Q":[..]} (high degree first).
// A wrapper object {"map": {...}, ...} is accepted as well.
DynamicMap parse_map(const json& def);
const json& map_definition(const json& doc);
json read_json_file(const std::string& path);

struct FixtureEntry {
  std::string name;
  std::string formula;
  std::string notes;
  json map;
  json expected;
};

const std::vector<FixtureEntry>& fixture_catalog();
const FixtureEntry& find_fixture(const std::string& name);
json fixture_document(const FixtureEntry& e);
json catalog_report();

json analyze_report(const json& doc, const AnalysisConfig& cfg);
json identities_report(const json& doc, const AnalysisConfig& cfg);

// `column` is an integer (1-based critical index) or "sigma" / "b".
json ratio_table_report(const json& doc, int j, const std::string& column, int m_max, const AnalysisConfig& cfg);

// Bounds on |ratio_m - L| from the term magnitudes, a geometric fit past the
// table and the tail bound of L itself.
std::vector<double> ratio_tail_bounds(const RatioSequence& seq, const SeriesValue& limit);

// Byte-stable rendering (sorted keys, fixed indentation).
std::string render(const json& report, const std::string& format);
std::string to_csv(const json& report);

int exit_code_for(ErrorKind kind);
// 4 when the report carries an inconclusive verdict, else 0.
int exit_code_for(const json& report);
json error_report(ErrorKind kind, const std::string& message);

}  // namespace tlab

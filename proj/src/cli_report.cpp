#include "tlab/cli_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tlab/rat_space.hpp"
#include "tlab/ruelle_operator.hpp"
#include "tlab/transversality.hpp"

namespace tlab {

namespace {

json real_to_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<cd> complex_list(const json& arr, const std::string& what) {
  require(arr.is_array(), what + " must be an array of [re, im] pairs");
  std::vector<cd> out;
  for (const auto& e : arr) out.push_back(complex_from_json(e));
  return out;
}

json complex_list_json(const std::vector<cd>& v) {
  json a = json::array();
  for (cd z : v) a.push_back(complex_to_json(z));
  return a;
}

json poly_json(const ComplexPoly& p) { return complex_list_json(p.coeffs()); }

json rational_map_json(const RationalMap& f) {
  return {{"type", "rational"},
          {"sigma", complex_to_json(f.sigma())},
          {"b", complex_to_json(f.b())},
          {"P", poly_json(f.P())},
          {"Q", poly_json(f.Q())}};
}

json series_json(const SeriesValue& s) {
  return {{"value", complex_to_json(s.value)},
          {"tail_bound", real_to_json(s.tail_bound)},
          {"terms_used", s.terms_used},
          {"status", to_string(s.status)},
          {"tol", s.tol}};
}

json stats_json(std::vector<double> v, int skipped) {
  json s{{"count", v.size()}, {"skipped", skipped}, {"max", nullptr}, {"median", nullptr}};
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  s["max"] = real_to_json(v.back());
  s["median"] = real_to_json(n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
  return s;
}

json matrix_json(const TransversalityMatrix& m) {
  json rows = json::array(), tails = json::array(), cols = json::array();
  for (const Slot& s : m.columns) cols.push_back(s.label());
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
    json row = json::array(), trow = json::array();
    for (Eigen::Index k = 0; k < m.entries.cols(); ++k) {
      row.push_back(complex_to_json(m.entries(i, k)));
      trow.push_back(real_to_json(m.tail_bounds(i, k)));
    }
    rows.push_back(row);
    tails.push_back(trow);
  }
  json sv = json::array();
  for (double s : m.spectrum.values) sv.push_back(real_to_json(s));
  return {{"case", to_string(m.matrix_case)},
          {"rows", m.row_labels},
          {"columns", cols},
          {"entries", rows},
          {"tail_bounds", tails},
          {"singular_values", sv},
          {"numerical_rank", m.spectrum.rank},
          {"rank_tolerance", m.spectrum.tolerance},
          {"r", m.r},
          {"nu", m.nu},
          {"r0", m.r0},
          {"r_prime", m.r_prime}};
}

json verdict_json(const RankVerdict& v) {
  return {{"status", to_string(v.status)},
          {"maximal", v.maximal},
          {"margin", real_to_json(v.margin)},
          {"tail_sum", real_to_json(v.tail_sum)},
          {"tol", v.tol}};
}

json mobius_json(const MobiusTransform& M) {
  return json::array({complex_to_json(M.a()), complex_to_json(M.b()), complex_to_json(M.c()), complex_to_json(M.d())});
}

json header(const std::string& command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

SeriesOptions series_options(const AnalysisConfig& cfg) { return {cfg.tol, cfg.max_terms}; }

OrbitOptions orbit_options(const AnalysisConfig& cfg) {
  OrbitOptions o;
  if (cfg.escape_radius) o.escape_radius = *cfg.escape_radius;
  return o;
}

json kernel_stats(const DynamicMap& f, const std::vector<cd>& excl, const AnalysisConfig& cfg) {
  std::vector<double> res;
  int skipped = 0;
  for (int i = 0; i < cfg.probes; ++i) {
    try {
      const auto pr = sample_probe_pair(f, cfg.seed, static_cast<std::uint64_t>(i), excl);
      res.push_back(kernel_identity_residual(f, pr.z, pr.x));
    } catch (const Error&) {
      ++skipped;
    }
  }
  return stats_json(std::move(res), skipped);
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) return fmt(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

FixtureEntry make_fixture(std::string name, std::string formula, std::string notes, json map, json expected) {
  return {std::move(name), std::move(formula), std::move(notes), std::move(map), std::move(expected)};
}

json cpair(double re, double im) { return json::array({re, im}); }

}  // namespace

void validate(const AnalysisConfig& cfg) {
  require(cfg.tol > 0.0 && std::isfinite(cfg.tol), "tol must be positive");
  require(cfg.max_terms >= 10, "max-terms must be at least 10");
  require(cfg.probes >= 0, "probes must be nonnegative");
  require(!cfg.escape_radius || (*cfg.escape_radius > 0.0 && std::isfinite(*cfg.escape_radius)),
          "escape radius must be positive");
  require(cfg.format == "json" || cfg.format == "csv", "format must be json or csv");
  require(cfg.space_case == "auto" || parse_space_case(cfg.space_case).has_value(), "case must be auto, H, NN or ND");
  for (double l : cfg.lambdas) require(std::isfinite(l), "lambda values must be finite");
}

json config_to_json(const AnalysisConfig& cfg) {
  return {{"tol", cfg.tol},
          {"max_terms", cfg.max_terms},
          {"escape_radius", cfg.escape_radius ? json(*cfg.escape_radius) : json("auto")},
          {"probes", cfg.probes},
          {"seed", cfg.seed},
          {"format", cfg.format},
          {"case", cfg.space_case},
          {"assert_non_exceptional", cfg.assert_non_exceptional},
          {"assert_c_compact", cfg.assert_c_compact},
          {"lambdas", cfg.lambdas}};
}

json complex_to_json(cd z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

cd complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
          "complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& map_definition(const json& doc) {
  require(doc.is_object(), "map definition must be a JSON object");
  if (doc.contains("map")) {
    require(doc["map"].is_object(), "\"map\" must be an object");
    return doc["map"];
  }
  return doc;
}

DynamicMap parse_map(const json& doc) {
  const json& m = map_definition(doc);
  require(m.contains("type") && m["type"].is_string(), "map definition needs a \"type\" string");
  const std::string type = m["type"].get<std::string>();
  if (type == "poly") {
    require(m.contains("degree") && m["degree"].is_number_integer(), "poly map needs an integer \"degree\"");
    const int d = m["degree"].get<int>();
    require(d >= 2, "degree must be at least 2");
    require(m.contains("coeffs"), "poly map needs \"coeffs\"");
    const auto coeffs = complex_list(m["coeffs"], "coeffs");
    require(coeffs.size() == static_cast<std::size_t>(d - 1), "poly map needs degree-1 coefficients a_1..a_{d-1}");
    bool real = false;
    if (m.contains("real")) {
      require(m["real"].is_boolean(), "\"real\" must be a boolean");
      real = m["real"].get<bool>();
    }
    return DynamicMap::polynomial(PolyMap(d, coeffs, real));
  }
  if (type == "rational") {
    for (const char* key : {"sigma", "b", "P", "Q"})
      require(m.contains(key), std::string("rational map needs \"") + key + "\"");
    const cd sigma = complex_from_json(m["sigma"]);
    const cd b = complex_from_json(m["b"]);
    const auto P = complex_list(m["P"], "P");
    const auto Q = complex_list(m["Q"], "Q");
    require(!P.empty() && !Q.empty(), "P and Q need at least one coefficient");
    return DynamicMap::rational(RationalMap(sigma, b, ComplexPoly(P), ComplexPoly(Q)));
  }
  fail(ErrorKind::InvalidInput, "unknown map type \"" + type + "\"");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidInput, std::string("parse error: ") + e.what());
  }
}

const std::vector<FixtureEntry>& fixture_catalog() {
  static const std::vector<FixtureEntry> catalog = [] {
    const double s3 = std::sqrt(3.0);
    // z^3 + a with a = omega sqrt(1 - omega): 0 -> a -> beta, beta fixed with multiplier 3(1 - omega).
    const cd omega = std::polar(1.0, 2.0 * std::acos(-1.0) / 3.0);
    const cd a = omega * std::sqrt(1.0 - omega);
    std::vector<FixtureEntry> v;
    v.push_back(make_fixture(
        "chebyshev", "z^2 - 2", "c = 0 -> -2 -> 2, fixed with multiplier 4; L = 1 - 1/4 sum 4^-n",
        {{"type", "poly"}, {"degree", 2}, {"coeffs", json::array({cpair(-2, 0)})}, {"real", true}},
        {{"summable", json::array({"c1"})}, {"similarity_matrix", {{cpair(2.0 / 3.0, 0)}}}, {"rank", 1}, {"margin", 2.0 / 3.0}}));
    v.push_back(make_fixture(
        "misiurewicz_i", "z^2 + i", "c = 0 -> i -> -1+i -> -i -> -1+i, a repelling 2-cycle with multiplier 4+4i",
        {{"type", "poly"}, {"degree", 2}, {"coeffs", json::array({cpair(0, 1)})}},
        {{"summable", json::array({"c1"})}, {"similarity_matrix", {{cpair(0.8, -0.4)}}}, {"rank", 1}}));
    v.push_back(make_fixture(
        "cubic_pm1", "z^3 - 3z", "c = 1 -> -2 and c = -1 -> 2, both fixed with multiplier 9",
        {{"type", "poly"}, {"degree", 3}, {"coeffs", json::array({cpair(-3, 0), cpair(0, 0)})}, {"real", true}},
        {{"summable", json::array({"c1", "c2"})},
         {"similarity_matrix", {{cpair(0.9375, 0), cpair(0.1875, 0)}, {cpair(0.1875, 0), cpair(0.9375, 0)}}},
         {"singular_values", {1.125, 0.75}},
         {"rank", 2},
         {"margin", 0.75}}));
    v.push_back(make_fixture(
        "cubic_double", "z^3 + a, a = omega sqrt(1 - omega)",
        "double critical point at 0; a maps to a repelling fixed point; L = (15 + i sqrt 3)/19",
        {{"type", "poly"}, {"degree", 3}, {"coeffs", json::array({cpair(0, 0), cpair(a.real(), a.imag())})}},
        {{"multiplicities", {2}},
         {"summable", json::array({"c1"})},
         {"similarity_matrix", {{cpair(15.0 / 19.0, s3 / 19.0)}}},
         {"rank", 1}}));
    v.push_back(make_fixture(
        "rat_h", "2z + 1/z", "infinity is attracting (multiplier 1/2); no critical point is summable",
        {{"type", "rational"}, {"sigma", cpair(2, 0)}, {"b", cpair(0, 0)}, {"P", {cpair(1, 0)}},
         {"Q", {cpair(1, 0), cpair(0, 0)}}},
        {{"case", "H"}, {"summable", json::array()}, {"rank", 0}}));
    v.push_back(make_fixture(
        "rat_nd", "z + 1/z", "infinity is a degenerate parabolic point; no critical point is summable",
        {{"type", "rational"}, {"sigma", cpair(1, 0)}, {"b", cpair(0, 0)}, {"P", {cpair(1, 0)}},
         {"Q", {cpair(1, 0), cpair(0, 0)}}},
        {{"case", "ND"}, {"summable", json::array()}, {"rank", 0}}));
    v.push_back(make_fixture(
        "rat_pole", "z/4 - 1 + 1/z", "c = -2 is a superattracting fixed point; c = 2 maps onto the pole at 0",
        {{"type", "rational"}, {"sigma", cpair(0.25, 0)}, {"b", cpair(-1, 0)}, {"P", {cpair(1, 0)}},
         {"Q", {cpair(1, 0), cpair(0, 0)}}},
        {{"case", "H"}, {"summable_count", 1}, {"r_prime", 1}}));
    v.push_back(make_fixture(
        "rat_inf", "z/4 + 1/z^2", "c = 0 is a double pole with value infinity; the finite critical points are attracted",
        {{"type", "rational"}, {"sigma", cpair(0.25, 0)}, {"b", cpair(0, 0)}, {"P", {cpair(1, 0)}},
         {"Q", {cpair(1, 0), cpair(0, 0), cpair(0, 0)}}},
        {{"case", "H"}, {"summable_count", 1}, {"infinite_rows", 1}, {"r_prime", 1}}));
    return v;
  }();
  return catalog;
}

const FixtureEntry& find_fixture(const std::string& name) {
  for (const auto& e : fixture_catalog())
    if (e.name == name) return e;
  fail(ErrorKind::InvalidInput, "unknown fixture " + name);
}

json fixture_document(const FixtureEntry& e) {
  return {{"name", e.name}, {"formula", e.formula}, {"notes", e.notes}, {"map", e.map}, {"expected", e.expected}};
}

json catalog_report() {
  json r = header("catalog");
  json list = json::array();
  for (const auto& e : fixture_catalog()) list.push_back(fixture_document(e));
  r["fixtures"] = list;
  return r;
}

json analyze_report(const json& doc, const AnalysisConfig& cfg) {
  validate(cfg);
  const json& def = map_definition(doc);
  const DynamicMap input = parse_map(def);
  json r = header("analyze");
  r["map"] = def;
  r["config"] = config_to_json(cfg);
  r["assertions"] = {{"non_exceptional", cfg.assert_non_exceptional}, {"c_compact", cfg.assert_c_compact}};

  std::optional<DynamicMap> fopt;
  std::optional<SpaceClassification> cls;
  MatrixCase mc = MatrixCase::Poly;
  if (input.is_rational()) {
    ClassifyOptions co;
    if (cfg.space_case != "auto") co.asserted_case = parse_space_case(cfg.space_case);
    cls = classify(input.rational_map(), co);
    fopt = DynamicMap::rational(cls->normalized, cls->profile);
    mc = matrix_case_of(cls->space_case);
    json fps = json::array();
    for (const auto& fp : cls->fixed_points)
      fps.push_back({{"point", fp.point.inf ? json("infinity") : complex_to_json(fp.point.z)},
                     {"multiplier", complex_to_json(fp.multiplier)}});
    r["classification"] = {{"case", to_string(cls->space_case)},
                           {"normalizer", mobius_json(cls->normalizer)},
                           {"normalized_map", rational_map_json(cls->normalized)},
                           {"fixed_points", fps},
                           {"selected_fixed_point", cls->selected_fixed_point},
                           {"note", cls->note}};
  } else {
    fopt = input;
  }
  const DynamicMap& f = *fopt;
  const auto& prof = f.profile();

  std::vector<int> S;
  bool infinite_rows = false;
  json cps = json::array();
  for (std::size_t j = 0; j < prof.size(); ++j) {
    const OrbitTrace t = critical_orbit(f, static_cast<int>(j), cfg.max_terms, orbit_options(cfg));
    const SeriesValue s = summability_diagnostic(t, cfg.tol);
    const bool summable = s.status == SeriesStatus::Converged;
    if (summable) {
      S.push_back(static_cast<int>(j));
      infinite_rows = infinite_rows || prof.value_infinite[j];
    }
    cps.push_back({{"label", "c" + std::to_string(j + 1)},
                   {"point", complex_to_json(prof.points[j])},
                   {"multiplicity", prof.multiplicities[j]},
                   {"value", prof.value_infinite[j] ? json("infinity") : complex_to_json(prof.values[j])},
                   {"orbit",
                    {{"termination", to_string(t.termination)},
                     {"stop_index", t.stop_index},
                     {"points", t.points.size()},
                     {"escape_radius", real_to_json(t.escape_radius)},
                     {"cycle_start", t.cycle_start},
                     {"cycle_period", t.cycle_period}}},
                   {"summability", series_json(s)},
                   {"summable", summable}});
  }
  r["critical_points"] = cps;

  MatrixOptions mo;
  mo.series = series_options(cfg);
  mo.rank_tol = cfg.tol;
  const TransversalityMatrix m = assemble_matrix(f, S, mc, mo);
  r["matrix"] = matrix_json(m);
  const RankVerdict v = rank_verdict(m, cfg.tol);
  json verdict = verdict_json(v);
  verdict["hypotheses_asserted"] =
      !f.is_rational() || (cfg.assert_non_exceptional && cfg.assert_c_compact);
  r["verdict"] = verdict;

  if (f.is_rational() && infinite_rows) {
    const MobiusTransform M = choose_probe_mobius(cls->normalized, prof);
    const TransversalityMatrix lm = assemble_mobius_matrix(f, S, mc, M, mo);
    json jm = matrix_json(lm);
    jm["transform"] = mobius_json(M);
    jm["verdict"] = verdict_json(rank_verdict(lm, cfg.tol));
    r["mobius_matrix"] = jm;
  }

  r["identities"] = {{"kernel", kernel_stats(f, probe_exclusions(f), cfg)}};
  return r;
}

json identities_report(const json& doc, const AnalysisConfig& cfg) {
  validate(cfg);
  const json& def = map_definition(doc);
  const DynamicMap f = parse_map(def);
  json r = header("verify-identities");
  r["map"] = def;
  r["config"] = config_to_json(cfg);
  const auto excl = probe_exclusions(f);
  r["kernel"] = kernel_stats(f, excl, cfg);

  json sweep = json::array();
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    const double lambda = cfg.lambdas[li];
    std::vector<double> res, excess;
    int skipped = 0, within = 0;
    for (int i = 0; i < cfg.probes; ++i) {
      try {
        const auto pr = sample_probe_pair(f, cfg.seed, static_cast<std::uint64_t>(i), excl);
        const auto ir = resolvent_identity_residual(f, pr.z, lambda, pr.x, 200);
        res.push_back(ir.residual);
        excess.push_back(ir.residual - ir.truncation);
        if (ir.residual <= ir.truncation + 1e-9 * (1.0 + ir.truncation)) ++within;
      } catch (const Error&) {
        ++skipped;
      }
    }
    json s = stats_json(res, skipped);
    s["lambda"] = lambda;
    s["within_bound"] = within;
    s["max_excess"] = excess.empty() ? json(nullptr) : real_to_json(*std::max_element(excess.begin(), excess.end()));
    sweep.push_back(s);
  }
  r["resolvent"] = sweep;

  json fixed = json::array();
  const int fp_probes = std::min(cfg.probes, 20);
  for (int j : summable_indices(f, cfg.max_terms, cfg.tol)) {
    if (f.profile().value_infinite[static_cast<std::size_t>(j)]) continue;
    std::vector<double> res;
    int skipped = 0, decreased = 0;
    for (int i = 0; i < fp_probes; ++i) {
      try {
        const cd x = sample_probe(cfg.seed, static_cast<std::uint64_t>(i), 2, excl);
        const auto a = fixed_point_residual(f, j, x, 200, series_options(cfg));
        const auto b = fixed_point_residual(f, j, x, 400, series_options(cfg));
        res.push_back(a.residual);
        if (b.residual <= std::max(a.residual, 1e-12)) ++decreased;
      } catch (const Error&) {
        ++skipped;
      }
    }
    json s = stats_json(res, skipped);
    s["row"] = "c" + std::to_string(j + 1);
    s["non_increasing_on_doubling"] = decreased;
    fixed.push_back(s);
  }
  r["fixed_point"] = fixed;
  return r;
}

std::vector<double> ratio_tail_bounds(const RatioSequence& seq, const SeriesValue& limit) {
  const std::size_t n = seq.ratios.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < n; ++i) diffs.push_back(std::abs(seq.ratios[i + 1] - seq.ratios[i]));
  double beyond = 0.0;
  const bool frozen = seq.hit_infinity_at >= 0 && static_cast<std::size_t>(seq.hit_infinity_at) < n;
  if (!frozen) {
    const TailFit fit = fit_geometric_tail(diffs);
    // Without a usable fit, the distance from the last ratio to the limit
    // stands in for the unseen terms.
    beyond = fit.geometric ? fit.tail : std::abs(limit.value - seq.ratios.back());
  }
  double acc = beyond + limit.tail_bound;
  out[n - 1] = acc;
  for (std::size_t i = n - 1; i-- > 0;) {
    acc += diffs[i];
    out[i] = acc;
  }
  return out;
}

json ratio_table_report(const json& doc, int j, const std::string& column, int m_max, const AnalysisConfig& cfg) {
  validate(cfg);
  const json& def = map_definition(doc);
  const DynamicMap f = parse_map(def);
  const auto& prof = f.profile();
  require(j >= 1 && static_cast<std::size_t>(j) <= prof.size(), "j out of range");
  require(!prof.value_infinite[static_cast<std::size_t>(j - 1)], "row j must have a finite critical value");
  require(m_max >= 1, "m-max must be at least 1");
  Slot slot;
  if (column == "sigma" || column == "b") {
    require(f.is_rational(), "sigma and b columns exist for rational maps only");
    slot = column == "sigma" ? Slot::sigma() : Slot::b();
  } else {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(column, &used);
      require(used == column.size(), "k must be an integer, sigma or b");
    } catch (const std::logic_error&) {
      fail(ErrorKind::InvalidInput, "k must be an integer, sigma or b");
    }
    require(k >= 1 && static_cast<std::size_t>(k) <= prof.size(), "k out of range");
    slot = prof.value_infinite[static_cast<std::size_t>(k - 1)] ? Slot::reciprocal(k - 1) : Slot::value(k - 1);
  }
  const RatioSequence seq = ratio_sequence(f, j - 1, slot, m_max);
  const SeriesValue lim = similarity_factor(f, j - 1, slot, series_options(cfg));
  const auto bounds = ratio_tail_bounds(seq, lim);

  json r = header("ratio-table");
  r["map"] = def;
  r["config"] = config_to_json(cfg);
  r["row"] = "c" + std::to_string(j);
  r["column"] = slot.label();
  r["limit"] = series_json(lim);
  r["hit_infinity_at"] = seq.hit_infinity_at;
  json rows = json::array();
  for (std::size_t i = 0; i < seq.ratios.size(); ++i)
    rows.push_back({{"m", i + 1},
                    {"ratio", complex_to_json(seq.ratios[i])},
                    {"abs_error", real_to_json(std::abs(seq.ratios[i] - lim.value))},
                    {"tail_bound", real_to_json(bounds[i])}});
  r["table"] = rows;
  return r;
}

std::string to_csv(const json& report) {
  std::ostringstream out;
  if (report.contains("error")) {
    out << "kind,message\n"
        << csv_field(fmt(report["error"]["kind"])) << ',' << csv_field(fmt(report["error"]["message"])) << '\n';
    return out.str();
  }
  const std::string cmd = report.value("command", "");
  if (cmd == "analyze") {
    out << "row,column,re,im,tail_bound\n";
    const json& m = report["matrix"];
    for (std::size_t i = 0; i < m["rows"].size(); ++i)
      for (std::size_t k = 0; k < m["columns"].size(); ++k)
        out << fmt(m["rows"][i]) << ',' << fmt(m["columns"][k]) << ',' << fmt(m["entries"][i][k][0]) << ','
            << fmt(m["entries"][i][k][1]) << ',' << fmt(m["tail_bounds"][i][k]) << '\n';
  } else if (cmd == "ratio-table") {
    out << "m,re,im,abs_error,tail_bound\n";
    for (const auto& row : report["table"])
      out << fmt(row["m"]) << ',' << fmt(row["ratio"][0]) << ',' << fmt(row["ratio"][1]) << ','
          << fmt(row["abs_error"]) << ',' << fmt(row["tail_bound"]) << '\n';
  } else if (cmd == "verify-identities") {
    out << "suite,parameter,count,skipped,max,median\n";
    auto line = [&](const std::string& suite, const std::string& param, const json& s) {
      out << suite << ',' << param << ',' << fmt(s["count"]) << ',' << fmt(s["skipped"]) << ',' << fmt(s["max"])
          << ',' << fmt(s["median"]) << '\n';
    };
    line("kernel", "", report["kernel"]);
    for (const auto& s : report["resolvent"]) line("resolvent", fmt(s["lambda"]), s);
    for (const auto& s : report["fixed_point"]) line("fixed_point", fmt(s["row"]), s);
  } else if (cmd == "catalog") {
    out << "name,formula,notes\n";
    for (const auto& e : report["fixtures"])
      out << csv_field(fmt(e["name"])) << ',' << csv_field(fmt(e["formula"])) << ',' << csv_field(fmt(e["notes"]))
          << '\n';
  }
  return out.str();
}

std::string render(const json& report, const std::string& format) {
  if (format == "csv") return to_csv(report);
  return report.dump(2) + "\n";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::CaseMismatch:
    case ErrorKind::AmbiguousClassification: return 2;
    case ErrorKind::Inconclusive: return 4;
    default: return 3;
  }
}

int exit_code_for(const json& report) {
  auto inconclusive = [](const json& v) { return v.is_object() && v.value("status", "") == "inconclusive"; };
  if (report.contains("verdict") && inconclusive(report["verdict"])) return 4;
  if (report.contains("mobius_matrix") && inconclusive(report["mobius_matrix"]["verdict"])) return 4;
  return 0;
}

json error_report(ErrorKind kind, const std::string& message) {
  json r{{"schema_version", kSchemaVersion}};
  r["error"] = {{"kind", std::string(to_string(kind))}, {"message", message}, {"exit_code", exit_code_for(kind)}};
  return r;
}

}  // namespace tlab

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "doctest.h"
#include "tlab/cli_report.hpp"

using namespace tlab;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Inconclusive;
}

cd as_complex(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

AnalysisConfig quick() {
  AnalysisConfig c;
  c.probes = 10;
  return c;
}

}  // namespace

TEST_CASE("complex serialization") {
  CHECK(complex_to_json({1.5, -2.0}) == json::array({1.5, -2.0}));
  const double inf = std::numeric_limits<double>::infinity();
  const json j = complex_to_json({inf, std::nan("")});
  CHECK(j[0].is_null());
  CHECK(j[1].is_null());
  CHECK(complex_from_json(json::array({0.25, 3.0})) == cd{0.25, 3.0});
  CHECK(complex_from_json(json(2.0)) == cd{2.0, 0.0});
  CHECK(kind_of([] { complex_from_json(json::array({1.0})); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { complex_from_json(json("1+2i")); }) == ErrorKind::InvalidInput);
}

TEST_CASE("map parsing") {
  const auto f = parse_map(json::parse(R"({"type":"poly","degree":3,"coeffs":[[-3,0],[0,0]]})"));
  CHECK(f.degree() == 3);
  CHECK(f.profile().size() == 2);

  const auto g = parse_map(json::parse(R"({"map":{"type":"rational","sigma":[2,0],"b":[0,0],"P":[[1,0]],"Q":[[1,0],[0,0]]}})"));
  CHECK(g.is_rational());
  CHECK(g.sigma() == cd{2.0});

  for (const char* bad : {R"([1,2])", R"({"type":"poly","degree":3,"coeffs":[[1,0]]})",
                          R"({"type":"poly","degree":1,"coeffs":[]})", R"({"type":"poly","coeffs":[[1,0]]})",
                          R"({"type":"cubic","degree":3})", R"({"type":"rational","sigma":[1,0],"P":[[1,0]],"Q":[[1,0],[0,0]]})",
                          R"({"type":"poly","degree":2,"coeffs":[["a","b"]]})"}) {
    CAPTURE(bad);
    CHECK(kind_of([&] { parse_map(json::parse(bad)); }) == ErrorKind::InvalidInput);
  }
  CHECK(kind_of([] { read_json_file("/nonexistent/map.json"); }) == ErrorKind::InvalidInput);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(validate(AnalysisConfig{}));
  auto bad = [](auto mutate) {
    AnalysisConfig c;
    mutate(c);
    return kind_of([&] { validate(c); });
  };
  CHECK(bad([](AnalysisConfig& c) { c.tol = 0.0; }) == ErrorKind::InvalidInput);
  CHECK(bad([](AnalysisConfig& c) { c.max_terms = 3; }) == ErrorKind::InvalidInput);
  CHECK(bad([](AnalysisConfig& c) { c.probes = -1; }) == ErrorKind::InvalidInput);
  CHECK(bad([](AnalysisConfig& c) { c.format = "xml"; }) == ErrorKind::InvalidInput);
  CHECK(bad([](AnalysisConfig& c) { c.space_case = "Q"; }) == ErrorKind::InvalidInput);
  CHECK(bad([](AnalysisConfig& c) { c.escape_radius = -1.0; }) == ErrorKind::InvalidInput);
  CHECK(config_to_json(AnalysisConfig{})["escape_radius"] == "auto");
}

TEST_CASE("fixture catalog") {
  const auto& cat = fixture_catalog();
  REQUIRE(cat.size() == 8);
  for (const char* name : {"chebyshev", "misiurewicz_i", "cubic_pm1", "rat_h", "rat_nd"})
    CHECK_NOTHROW(find_fixture(name));
  CHECK(kind_of([] { find_fixture("nope"); }) == ErrorKind::InvalidInput);
  for (const auto& e : cat) {
    CAPTURE(e.name);
    CHECK_NOTHROW(parse_map(e.map));
    const json file = read_json_file(std::string(TLAB_FIXTURE_DIR) + "/" + e.name + ".json");
    CHECK(file == fixture_document(e));
    CHECK(e.expected.is_object());
    CHECK_FALSE(e.notes.empty());
  }
  CHECK(catalog_report()["fixtures"].size() == cat.size());
}

TEST_CASE("analyze reports match the catalog expectations") {
  for (const auto& e : fixture_catalog()) {
    CAPTURE(e.name);
    const json r = analyze_report(fixture_document(e), quick());
    const json& x = e.expected;
    const json& m = r["matrix"];
    CHECK(r["schema_version"] == kSchemaVersion);
    if (x.contains("similarity_matrix")) {
      const json& want = x["similarity_matrix"];
      REQUIRE(m["entries"].size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        REQUIRE(m["entries"][i].size() == want[i].size());
        for (std::size_t k = 0; k < want[i].size(); ++k)
          CHECK(std::abs(as_complex(m["entries"][i][k]) - as_complex(want[i][k])) <= 1e-10);
      }
    }
    if (x.contains("singular_values"))
      for (std::size_t i = 0; i < x["singular_values"].size(); ++i)
        CHECK(std::abs(m["singular_values"][i].get<double>() - x["singular_values"][i].get<double>()) <= 1e-10);
    if (x.contains("rank")) CHECK(m["r_prime"] == x["rank"]);
    if (x.contains("r_prime")) CHECK(m["r_prime"] == x["r_prime"]);
    if (x.contains("margin")) CHECK(std::abs(r["verdict"]["margin"].get<double>() - x["margin"].get<double>()) <= 1e-10);
    if (x.contains("case")) CHECK(r["classification"]["case"] == x["case"]);
    json summable = json::array();
    for (const auto& c : r["critical_points"])
      if (c["summable"].get<bool>()) summable.push_back(c["label"]);
    if (x.contains("summable")) CHECK(summable == x["summable"]);
    if (x.contains("summable_count")) CHECK(summable.size() == x["summable_count"].get<std::size_t>());
    if (x.contains("multiplicities")) CHECK(r["critical_points"][0]["multiplicity"] == x["multiplicities"][0]);
    if (x.contains("infinite_rows")) {
      REQUIRE(r.contains("mobius_matrix"));
      CHECK(r["mobius_matrix"]["numerical_rank"] == x["r_prime"]);
    }
    CHECK(r["verdict"]["status"] == "maximal");
    CHECK(exit_code_for(r) == 0);
    CHECK(r["identities"]["kernel"]["max"].get<double>() <= 1e-9);
  }
}

TEST_CASE("determinism") {
  const json doc = fixture_document(find_fixture("cubic_pm1"));
  const auto cfg = quick();
  CHECK(render(analyze_report(doc, cfg), "json") == render(analyze_report(doc, cfg), "json"));
  CHECK(render(identities_report(doc, cfg), "json") == render(identities_report(doc, cfg), "json"));
  auto other = cfg;
  other.seed = 7;
  const json a = analyze_report(doc, cfg), b = analyze_report(doc, other);
  CHECK(a["matrix"] == b["matrix"]);
  CHECK(a["identities"] != b["identities"]);
}

TEST_CASE("identity suites") {
  AnalysisConfig cfg;
  const json cheb = identities_report(fixture_document(find_fixture("chebyshev")), cfg);
  CHECK(cheb["kernel"]["count"] == 100);
  CHECK(cheb["kernel"]["max"].get<double>() <= 1e-9);

  const json cub = identities_report(fixture_document(find_fixture("cubic_pm1")), cfg);
  REQUIRE(cub["resolvent"].size() == 3);
  for (const auto& s : cub["resolvent"]) {
    CHECK(s["within_bound"] == s["count"]);
    CHECK(s["skipped"] == 0);
  }
  for (const auto& s : cub["fixed_point"]) {
    CHECK(s["max"].get<double>() <= 1e-9);
    CHECK(s["non_increasing_on_doubling"] == s["count"]);
  }

  cfg.probes = 0;
  const json empty = identities_report(fixture_document(find_fixture("chebyshev")), cfg);
  CHECK(empty["kernel"]["count"] == 0);
  CHECK(empty["kernel"]["max"].is_null());
  CHECK(exit_code_for(empty) == 0);
}

TEST_CASE("ratio tables") {
  const AnalysisConfig cfg;
  const json a = ratio_table_report(fixture_document(find_fixture("chebyshev")), 1, "1", 60, cfg);
  REQUIRE(a["table"].size() == 60);
  const json& last = a["table"].back();
  CHECK(last["abs_error"].get<double>() <= 1e-12);
  CHECK(last["abs_error"].get<double>() <= last["tail_bound"].get<double>());
  for (const auto& row : a["table"]) CHECK(row["abs_error"].get<double>() <= row["tail_bound"].get<double>() + 1e-15);

  const json b = ratio_table_report(fixture_document(find_fixture("misiurewicz_i")), 1, "1", 200, cfg);
  CHECK(std::abs(as_complex(b["table"].back()["ratio"]) - cd{0.8, -0.4}) <= 1e-10);

  const json c = ratio_table_report(fixture_document(find_fixture("cubic_pm1")), 1, "2", 1, cfg);
  REQUIRE(c["table"].size() == 1);
  CHECK(as_complex(c["table"][0]["ratio"]) == cd{0.0});
  const json d = ratio_table_report(fixture_document(find_fixture("cubic_pm1")), 2, "2", 1, cfg);
  CHECK(as_complex(d["table"][0]["ratio"]) == cd{1.0});

  const json e = ratio_table_report(fixture_document(find_fixture("rat_pole")), 2, "b", 5, cfg);
  CHECK(e["hit_infinity_at"] == 1);
  CHECK(e["column"] == "b");

  const json doc = fixture_document(find_fixture("chebyshev"));
  CHECK(kind_of([&] { ratio_table_report(doc, 2, "1", 5, cfg); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { ratio_table_report(doc, 1, "sigma", 5, cfg); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { ratio_table_report(doc, 1, "x1", 5, cfg); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { ratio_table_report(doc, 1, "1", 0, cfg); }) == ErrorKind::InvalidInput);
}

TEST_CASE("csv output") {
  const json r = analyze_report(fixture_document(find_fixture("cubic_pm1")), quick());
  const std::string csv = render(r, "csv");
  CHECK(csv.rfind("row,column,re,im,tail_bound\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("c1,v1,0.9375,0,") != std::string::npos);
  const std::string cat = render(catalog_report(), "csv");
  CHECK(std::count(cat.begin(), cat.end(), '\n') == 9);
}

TEST_CASE("exit codes and errors") {
  CHECK(exit_code_for(ErrorKind::InvalidInput) == 2);
  CHECK(exit_code_for(ErrorKind::CaseMismatch) == 2);
  CHECK(exit_code_for(ErrorKind::NonConvergence) == 3);
  CHECK(exit_code_for(ErrorKind::DivergenceDetected) == 3);
  CHECK(exit_code_for(ErrorKind::Inconclusive) == 4);
  const json e = error_report(ErrorKind::NonConvergence, "no luck");
  CHECK(e["error"]["kind"] == "NonConvergence");
  CHECK(e["error"]["exit_code"] == 3);
  json fake{{"verdict", {{"status", "inconclusive"}}}};
  CHECK(exit_code_for(fake) == 4);

  // A rational map cannot be analyzed under a case it does not satisfy.
  auto cfg = quick();
  cfg.space_case = "NN";
  CHECK_THROWS_AS(analyze_report(fixture_document(find_fixture("rat_h")), cfg), Error);
}

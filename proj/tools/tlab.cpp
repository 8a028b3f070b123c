#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tlab/cli_report.hpp"

namespace {

void add_common(CLI::App* cmd, tlab::AnalysisConfig& cfg, std::string& map_path, double& escape) {
  cmd->add_option("--map", map_path, "map definition (JSON file) or fixture name")->required();
  cmd->add_option("--tol", cfg.tol, "series and rank tolerance")->capture_default_str();
  cmd->add_option("--max-terms", cfg.max_terms, "orbit and series budget")->capture_default_str();
  cmd->add_option("--escape-radius", escape, "polynomial escape radius (default: auto)");
  cmd->add_option("--probes", cfg.probes, "number of seeded probes")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "probe seed")->capture_default_str();
  cmd->add_option("--format", cfg.format, "json or csv")->capture_default_str();
}

tlab::json load_map(const std::string& path) {
  // Bare names select a bundled fixture.
  if (path.find('/') == std::string::npos && path.find('.') == std::string::npos)
    return tlab::fixture_document(tlab::find_fixture(path));
  return tlab::read_json_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical orbit similarity and transversality toolkit"};
  app.require_subcommand(1);

  tlab::AnalysisConfig cfg;
  std::string map_path;
  double escape = 0.0;
  int j = 1;
  std::string k = "1";
  int m_max = 60;
  std::string catalog_format = "json";

  auto* analyze = app.add_subcommand("analyze", "profile, summability, similarity matrix and rank verdict");
  add_common(analyze, cfg, map_path, escape);
  analyze->add_option("--case", cfg.space_case, "auto, H, NN or ND")->capture_default_str();
  analyze->add_flag("--assert-non-exceptional", cfg.assert_non_exceptional, "assert the map is not a flexible Lattes map");
  analyze->add_flag("--assert-c-compact", cfg.assert_c_compact, "assert the C-compactness hypothesis");

  auto* verify = app.add_subcommand("verify-identities", "residual statistics of the operator identities");
  add_common(verify, cfg, map_path, escape);
  verify->add_option("--lambdas", cfg.lambdas, "lambda values for the resolvent identity")->delimiter(',');

  auto* ratio = app.add_subcommand("ratio-table", "ratio sequence toward a similarity factor");
  add_common(ratio, cfg, map_path, escape);
  ratio->add_option("--j", j, "critical index (1-based)")->capture_default_str();
  ratio->add_option("--k", k, "column: critical index (1-based), sigma or b")->capture_default_str();
  ratio->add_option("--m-max", m_max, "number of rows")->capture_default_str();

  auto* catalog = app.add_subcommand("catalog", "bundled fixtures");
  catalog->add_option("--format", catalog_format, "json or csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cout << tlab::error_report(tlab::ErrorKind::InvalidInput, e.what()).dump(2) << '\n';
    return 2;
  }

  if (escape != 0.0) cfg.escape_radius = escape;
  try {
    tlab::json report;
    std::string format = cfg.format;
    if (*catalog) {
      report = tlab::catalog_report();
      format = catalog_format;
      tlab::require(format == "json" || format == "csv", "format must be json or csv");
    } else {
      tlab::validate(cfg);
      const tlab::json doc = load_map(map_path);
      if (*analyze) {
        report = tlab::analyze_report(doc, cfg);
      } else if (*verify) {
        report = tlab::identities_report(doc, cfg);
      } else {
        report = tlab::ratio_table_report(doc, j, k, m_max, cfg);
      }
    }
    std::cout << tlab::render(report, format);
    return tlab::exit_code_for(report);
  } catch (const tlab::Error& e) {
    std::cout << tlab::error_report(e.kind(), e.what()).dump(2) << '\n';
    return tlab::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cout << tlab::error_report(tlab::ErrorKind::InvalidInput, e.what()).dump(2) << '\n';
    return 2;
  }
}

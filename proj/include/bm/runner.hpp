#pragma once

// Scenario execution: per-eps sampling, checks, and the files written to the output
// directory (points_<eps>.csv, hull_<eps>.json, report.json).

#include "bm/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bm {

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailure = 1,
  kExitSchemaError = 2,
  kExitValidationFailure = 3,
};

struct RunOptions {
  std::filesystem::path out_dir;  ///< empty: compute the report without writing files
  std::vector<double> eps_override;
  int threads = 1;
};

struct RunOutcome {
  int exit_code = kExitPass;
  nlohmann::json report;
  std::string message;  ///< first failing check or validation message
};

/// Runs every requested check. Throws SchemaError for an invalid eps override.
RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options);

/// Resolved parameters plus the grid pitch and tolerance for every eps.
std::string describe_scenario(const Scenario& scenario, int threads = 1);

struct ScenarioListing {
  std::filesystem::path path;
  std::string name;
  std::string description;
  std::string error;  ///< non-empty when the file does not load
};

/// Every *.json file of `dir`, sorted by file name.
std::vector<ScenarioListing> list_scenarios(const std::filesystem::path& dir);

/// Shortest round-trip decimal form of eps, as used in output file names.
std::string format_eps(double eps);

void write_points_csv(std::ostream& out, const PointCloud& cloud);
nlohmann::json hull_json(const Polytope& hull);

}  // namespace bm

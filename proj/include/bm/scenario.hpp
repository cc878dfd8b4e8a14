#pragma once

// JSON scenario files: model, eps schedule, resolution, tolerances and requested checks.

#include "bm/hamiltonian.hpp"
#include "bm/moment_image.hpp"
#include "bm/moser2d.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bm {

inline constexpr int kSchemaVersion = 1;

/// Check names accepted in "checks".
inline const std::vector<std::string> kCheckNames = {"local", "global", "convexity", "fold",
                                                     "desing", "moser", "fit"};

struct ScenarioTolerances {
  std::optional<double> absolute;  ///< replaces pitch_factor * pitch when set
  double pitch_factor = 2.0;
  double desing_relative = 1e-5;
  double moser_residual = 1e-5;
  double slope_relative = 0.2;
  double fit = 1e-8;
};

struct MoserGridStudy {
  std::vector<int> sizes;
  int steps = 100;
};

struct MoserTimeStudy {
  std::vector<int> steps;
  int reference = 512;
  Collar2DForm form;  ///< the main form unless overridden
};

struct MoserSpec {
  Collar2DForm form;
  int steps = 100;
  std::optional<MoserGridStudy> grid_study;
  std::optional<MoserTimeStudy> time_study;
};

struct FitSpec {
  int samples = 40;  ///< per side of Z
  int smooth_degree = 3;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  std::optional<ScenarioModel> model;
  std::vector<double> eps_list;
  Resolution resolution;
  ScenarioTolerances tolerances;
  std::vector<std::string> checks;
  std::optional<MoserSpec> moser;
  FitSpec fit;

  bool wants(std::string_view check) const;
};

/// Largest admissible eps: delta for the collar, 1 (the range of |f|) otherwise.
double half_width(const ModelGeometry& geometry);

std::string geometry_kind(const ModelGeometry& geometry);

/// Parses and checks the schema. Throws SchemaError; malformed JSON reports line and column.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// eps_list must be non-empty, strictly decreasing, positive and below the half-width.
void check_eps_list(const std::vector<double>& eps, double limit, const std::string& field);

nlohmann::json to_json(const Scenario& scenario);

}  // namespace bm

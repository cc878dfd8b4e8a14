#include "bm/errors.hpp"
#include "bm/runner.hpp"
#include "bm/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = BM_SCENARIO_DIR;
const fs::path kData = BM_TEST_DATA_DIR;
const std::string kTool = BM_TOOL_PATH;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bm_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Command {
  int exit_code;
  std::string output;
};

Command shell(const std::string& args, const std::string& env = "") {
  const auto log = fs::temp_directory_path() / "bm_cli_test_output.txt";
  const std::string cmd = env + " " + kTool + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

bm::SchemaError schema_error(const std::string& text) {
  try {
    bm::parse_scenario(text);
  } catch (const bm::SchemaError& e) {
    return e;
  }
  FAIL("no schema error for: " << text);
  return bm::SchemaError("", "");
}

const char* kMinimal = R"({
  "schema_version": 1, "name": "x", "checks": ["local"], "eps_list": [0.1],
  "model": {"torus": {"dim": 2}, "weights": [0, 1], "leaf": {"vertices": [[0], [1]]},
            "geometry": {"kind": "collar", "delta": 0.5}}
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto s = bm::parse_scenario(kMinimal);
  CHECK(s.name == "x");
  CHECK(s.model->order() == 2);
  CHECK(s.model->xi_weights() == std::vector<double>{0.0, 1.0});
  CHECK(s.resolution.n_collar == 201);
  CHECK(s.tolerances.pitch_factor == 2.0);

  const auto round_trip = bm::parse_scenario(bm::to_json(s).dump());
  CHECK(bm::to_json(round_trip) == bm::to_json(s));
}

TEST_CASE("schema errors name the field") {
  CHECK(schema_error(with(kMinimal, R"("schema_version": 1)", R"("schema_version": 7)")).field() == "schema_version");
  CHECK(schema_error(with(kMinimal, R"("eps_list": [0.1])", R"("eps_list": [0.1, 0.2])")).field() == "eps_list[1]");
  CHECK(schema_error(with(kMinimal, R"("eps_list": [0.1])", R"("eps_list": [0.6])")).field() == "eps_list[0]");
  CHECK(schema_error(with(kMinimal, R"("eps_list": [0.1])", R"("eps_list": [])")).field() == "eps_list");
  CHECK(schema_error(with(kMinimal, R"(["local"])", R"(["locale"])")).field() == "checks[0]");
  CHECK(schema_error(with(kMinimal, R"("kind": "collar")", R"("kind": "torus")")).field() == "model.geometry.kind");
  CHECK(schema_error(with(kMinimal, R"([[0], [1]])", R"([[0], [1, 2]])")).field() == "model.leaf.vertices[1]");
  CHECK(schema_error(with(kMinimal, R"("name": "x",)", "")).field() == "name");
  CHECK(schema_error(with(kMinimal, R"("name": "x",)", R"("name": "x", "colour": 1,)")).field() == "colour");
  CHECK(schema_error(with(with(kMinimal, R"("kind": "collar", "delta": 0.5)", R"("kind": "circle")"), R"(["local"])",
                          R"(["fit"])"))
            .field() == "checks");
  CHECK(schema_error(with(kMinimal, R"(["local"])", R"(["moser"])")).field() == "moser");
}

TEST_CASE("malformed JSON reports line and column") {
  const auto e = schema_error(slurp(kData / "malformed.json"));
  const std::string what = e.what();
  CHECK(what.find("line 5, column ") != std::string::npos);
}

TEST_CASE("eps formatting") {
  CHECK(bm::format_eps(0.1) == "0.1");
  CHECK(bm::format_eps(0.05) == "0.05");
  CHECK(bm::format_eps(0.2 / 8) == "0.025");
  CHECK(bm::format_eps(1e-7) == "1e-07");
}

TEST_CASE("points csv") {
  bm::PointCloud cloud;
  cloud.dim = 2;
  Eigen::VectorXd p(2);
  p << 0.1, -1.0 / 3.0;
  cloud.push_back(p, 1, -1);
  std::ostringstream out;
  bm::write_points_csv(out, cloud);
  CHECK(out.str() == "coord_0,coord_1,component,side\n0.10000000000000001,-0.33333333333333331,1,-1\n");
}

TEST_CASE("bundled scenarios") {
  const auto all = bm::list_scenarios(kScenarios);
  CHECK(all.size() >= 6);
  int odd = 0, even = 0, one_end = 0, two_ends = 0, cut = 0, no_cut = 0;
  for (const auto& l : all) {
    CAPTURE(l.path);
    CHECK(l.error.empty());
    const auto s = bm::load_scenario(l.path);
    if (!s.model) continue;
    (s.model->order() % 2 ? odd : even)++;
    for (const auto& seg : bm::component_segments(*s.model)) (seg.boundary_zero_count() == 2 ? two_ends : one_end)++;
    (s.model->cuts.empty() ? no_cut : cut)++;
  }
  CHECK(odd > 0);
  CHECK(even > 0);
  CHECK(one_end > 0);
  CHECK(two_ends > 0);
  CHECK(cut > 0);
  CHECK(no_cut > 0);
}

TEST_CASE("run: every bundled scenario passes") {
  for (const auto& l : bm::list_scenarios(kScenarios)) {
    CAPTURE(l.path);
    const auto out = bm::run_scenario(bm::load_scenario(l.path), {});
    CHECK(out.exit_code == bm::kExitPass);
    CHECK(out.message.empty());
  }
}

TEST_CASE("run: t2_leaf_segment_m2 is case (1) on both components") {
  const auto s = bm::load_scenario(kScenarios / "t2_leaf_segment_m2.json");
  const auto out = bm::run_scenario(s, {});
  CHECK(out.exit_code == bm::kExitPass);
  for (const auto& e : out.report["per_eps"]) {
    CHECK(e["classification"] == nlohmann::json::array({"case_1", "case_1"}));
    CHECK(e.contains("a_eps"));
    CHECK(e.contains("hull_vertices"));
    CHECK(e.contains("max_hausdorff_defect"));
    CHECK(e["max_hausdorff_defect"].get<double>() <= e["tol"].get<double>());
  }
}

TEST_CASE("run: report always carries the per-eps table") {
  for (const char* name : {"collar_m2_segment.json", "collar_m1_fold.json", "sphere_m2_hemispheres.json"}) {
    const auto s = bm::load_scenario(kScenarios / name);
    const auto out = bm::run_scenario(s, {});
    CAPTURE(name);
    CHECK(out.exit_code == bm::kExitPass);
    REQUIRE(out.report["per_eps"].size() == s.eps_list.size());
    for (std::size_t i = 0; i < s.eps_list.size(); ++i) {
      const auto& e = out.report["per_eps"][i];
      CHECK(e["eps"].get<double>() == s.eps_list[i]);
      for (const char* key : {"a_eps", "hull_vertices", "classification", "max_hausdorff_defect"}) CHECK(e.contains(key));
    }
  }
}

TEST_CASE("run: planted violations and failures") {
  SUBCASE("w_m = 0 exits 3 citing Assumption 1") {
    const auto out = bm::run_scenario(bm::load_scenario(kData / "w_m_zero.json"), {});
    CHECK(out.exit_code == bm::kExitValidationFailure);
    CHECK(out.message.find("Assumption 1") != std::string::npos);
  }
  SUBCASE("jet-changing Moser perturbation is rejected") {
    const auto out = bm::run_scenario(bm::load_scenario(kData / "moser_jet_violation.json"), {});
    CHECK(out.exit_code == bm::kExitValidationFailure);
  }
  SUBCASE("degenerate Moser path is a check failure") {
    const auto out = bm::run_scenario(bm::load_scenario(kData / "moser_degenerate.json"), {});
    CHECK(out.exit_code == bm::kExitCheckFailure);
    CHECK(out.report["moser"]["error"] == "degeneracy");
  }
  SUBCASE("an unplanned cut breaks the local product") {
    auto s = bm::load_scenario(kScenarios / "collar_m2_segment.json");
    Eigen::Vector2d normal(1.0, 0.0);
    s.model->cuts.push_back({bm::HalfSpace{normal, 5.0}, std::nullopt});
    const auto out = bm::run_scenario(s, {});
    CHECK(out.exit_code == bm::kExitCheckFailure);
    CHECK(out.report["check_results"]["local"] == false);
  }
  SUBCASE("eps override is validated") {
    const auto s = bm::load_scenario(kScenarios / "collar_m2_segment.json");
    bm::RunOptions o;
    o.eps_override = {0.1, 0.3};
    CHECK_THROWS_AS(bm::run_scenario(s, o), bm::SchemaError);
    o.eps_override = {0.3, 0.15};
    const auto out = bm::run_scenario(s, o);
    CHECK(out.report["eps_list"] == nlohmann::json::array({0.3, 0.15}));
  }
}

TEST_CASE("tool: exit codes") {
  const auto out = scratch("exit");
  CHECK(shell("run " + (kScenarios / "moser_zero.json").string() + " --out " + out.string()).exit_code == 0);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["moser"]["residual"].get<double>() == 0.0);

  const auto bad = shell("run " + (kData / "w_m_zero.json").string() + " --out " + out.string());
  CHECK(bad.exit_code == 3);
  CHECK(bad.output.find("Assumption 1") != std::string::npos);

  const auto malformed = shell("describe " + (kData / "malformed.json").string());
  CHECK(malformed.exit_code == 2);
  CHECK(malformed.output.find("line 5") != std::string::npos);

  CHECK(shell("run " + (kData / "bad_eps_order.json").string() + " --out " + out.string()).exit_code == 2);
  CHECK(shell("run " + (kData / "moser_degenerate.json").string() + " --out " + out.string()).exit_code == 1);
  CHECK(shell("describe /nonexistent/scenario.json").exit_code == 2);
}

TEST_CASE("tool: list and describe") {
  const auto list = shell("list --dir " + kScenarios.string());
  CHECK(list.exit_code == 0);
  for (const auto& l : bm::list_scenarios(kScenarios)) CHECK(list.output.find(l.name) != std::string::npos);

  const auto d = shell("describe " + (kScenarios / "collar_m2_segment.json").string());
  CHECK(d.exit_code == 0);
  CHECK(d.output.find("eps_list:    0.2, 0.1, 0.05") != std::string::npos);
  CHECK(d.output.find("pitch = ") != std::string::npos);
  CHECK(d.output.find("tol = ") != std::string::npos);
}

TEST_CASE("tool: runs are deterministic and thread independent") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto scenario = (kScenarios / "t2_planted_cut_m2.json").string();
  REQUIRE(shell("run " + scenario + " --out " + a.string() + " --threads 1").exit_code == 0);
  REQUIRE(shell("run " + scenario + " --out " + b.string(), "BM_MOMENT_THREADS=3").exit_code == 0);
  const auto s = bm::load_scenario(scenario);
  for (double eps : s.eps_list) {
    const auto e = bm::format_eps(eps);
    CHECK(slurp(a / ("points_" + e + ".csv")) == slurp(b / ("points_" + e + ".csv")));
    CHECK(slurp(a / ("hull_" + e + ".json")) == slurp(b / ("hull_" + e + ".json")));
  }
  auto ra = nlohmann::json::parse(slurp(a / "report.json"));
  auto rb = nlohmann::json::parse(slurp(b / "report.json"));
  ra.erase("timing");
  rb.erase("timing");
  CHECK(ra == rb);
}

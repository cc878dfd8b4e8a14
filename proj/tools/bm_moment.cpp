#include "bm/errors.hpp"
#include "bm/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#ifndef BM_SCENARIO_DIR
#define BM_SCENARIO_DIR "scenarios"
#endif

namespace {

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("BM_MOMENT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
    std::cerr << "warning: ignoring BM_MOMENT_THREADS='" << env << "'\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment images of b^m-symplectic toric actions"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::vector<double> eps_override;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run a scenario and write points, hulls and report.json");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  run->add_option("--eps-override", eps_override, "replacement eps list (strictly decreasing)");
  run->add_option("--threads", threads, "worker threads (default: BM_MOMENT_THREADS or 1)");

  std::string list_dir = BM_SCENARIO_DIR;
  auto* list = app.add_subcommand("list", "list bundled scenarios");
  list->add_option("--dir", list_dir, "scenario directory")->capture_default_str();

  std::string describe_path;
  auto* describe = app.add_subcommand("describe", "print resolved parameters and derived tolerances");
  describe->add_option("scenario", describe_path, "scenario JSON file")->required();
  describe->add_option("--threads", threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto scenario = bm::load_scenario(scenario_path);
      bm::RunOptions options;
      options.out_dir = out_dir;
      options.eps_override = eps_override;
      options.threads = resolve_threads(threads);
      const auto outcome = bm::run_scenario(scenario, options);
      std::cout << scenario.name << ": " << (outcome.exit_code == bm::kExitPass ? "PASS" : "FAIL");
      if (!outcome.message.empty()) std::cout << " (" << outcome.message << ")";
      std::cout << "\n";
      if (outcome.report.contains("check_results"))
        for (const auto& [check, pass] : outcome.report.at("check_results").items())
          std::cout << "  " << check << ": " << (pass.get<bool>() ? "pass" : "FAIL") << "\n";
      if (outcome.exit_code == bm::kExitValidationFailure) std::cerr << "error: " << outcome.message << "\n";
      return outcome.exit_code;
    }
    if (*list) {
      for (const auto& l : bm::list_scenarios(list_dir)) {
        std::cout << l.path.filename().string() << "  ";
        if (l.error.empty()) std::cout << l.name << "  " << l.description << "\n";
        else std::cout << "INVALID: " << l.error << "\n";
      }
      return bm::kExitPass;
    }
    if (*describe) {
      std::cout << bm::describe_scenario(bm::load_scenario(describe_path), resolve_threads(threads));
      return bm::kExitPass;
    }
  } catch (const bm::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return bm::kExitSchemaError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bm::kExitSchemaError;
  }
  return bm::kExitPass;
}

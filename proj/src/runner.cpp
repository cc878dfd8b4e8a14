#include "bm/runner.hpp"

#include "bm/collar_model.hpp"
#include "bm/desingularize.hpp"
#include "bm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bm {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json point_json(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

json witness_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  return {{"point", point_json(w->point)}, {"distance", w->distance}, {"source", w->source}};
}

json halfspace_json(const HalfSpace& h) { return {{"normal", point_json(h.normal)}, {"offset", h.offset}}; }

json convexity_json(const ConvexityReport& c) {
  return {{"pass", c.pass},
          {"tol", c.tol},
          {"raster_pitch", c.pitch_used},
          {"raster_points", c.raster_points},
          {"max_gap", c.max_gap},
          {"witness", c.witness ? point_json(*c.witness) : json(nullptr)}};
}

json component_json(const ComponentReport& c) {
  json cuts = json::array();
  for (const auto& cut : c.cuts)
    cuts.push_back({{"cut", cut.cut_index},
                    {"active", cut.active},
                    {"recovered", cut.recovered},
                    {"angle", cut.angle},
                    {"offset_error", cut.offset_error}});
  json recovered = json::array();
  for (const auto& h : c.recovered) recovered.push_back(halfspace_json(h));
  return {{"component", c.component},
          {"boundary_count", c.boundary_count},
          {"expected", to_string(c.expected)},
          {"observed", to_string(c.observed)},
          {"pass", c.pass},
          {"a_eps", c.a_eps},
          {"product_defect", c.product_defect},
          {"form_defect", c.form_defect},
          {"max_defect", c.max_defect},
          {"delta_coincidence", c.delta_coincidence ? json(*c.delta_coincidence) : json(nullptr)},
          {"contained", c.contained},
          {"recovered_halfspaces", recovered},
          {"cuts", cuts},
          {"convexity", convexity_json(c.convexity)},
          {"hull_vertices", c.hull.vertices.size()}};
}

json study_json(const ConvergenceStudy& s, double expected, double relative) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.values.size(); ++i)
    rows.push_back({{"value", s.values[i]}, {"spacing", s.spacing[i]}, {"error", s.errors[i]}});
  const bool pass = std::abs(s.slope - expected) <= relative * expected;
  return {{"parameter", s.parameter}, {"rows", rows}, {"slope", s.slope}, {"expected_slope", expected}, {"pass", pass}};
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }

  void text(const std::string& name, const std::string& content) const {
    if (!enabled()) return;
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << content;
  }
  void json_file(const std::string& name, const json& j) const { text(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
};

struct CheckTally {
  json summary = json::object();
  std::string first_failure;

  void record(const std::string& check, bool pass, const std::string& where) {
    auto& entry = summary[check];
    if (entry.is_null()) entry = true;
    if (!pass) {
      entry = false;
      if (first_failure.empty()) first_failure = check + " failed" + (where.empty() ? "" : " at " + where);
    }
  }
  bool all_pass() const {
    return std::all_of(summary.begin(), summary.end(), [](const json& v) { return v.get<bool>(); });
  }
};

json run_eps(const Scenario& s, const ScenarioModel& model, double eps, int threads, const Writer& writer,
             CheckTally& tally, json& timing) {
  const auto start = Clock::now();
  const int xi = model.torus.xi_index;
  const int m = model.order();
  const std::string tag = "eps=" + format_eps(eps);

  const PointCloud cloud = sample_image(model, eps, s.resolution, threads);
  const GridPitch pitch = grid_pitch(cloud, xi);
  const double tol = s.tolerances.absolute ? *s.tolerances.absolute : s.tolerances.pitch_factor * pitch.pitch();
  const Polytope hull = convex_hull(cloud);
  const double a = compute_a_eps(model, eps);

  if (writer.enabled()) {
    std::ostringstream csv;
    write_points_csv(csv, cloud);
    writer.text("points_" + format_eps(eps) + ".csv", csv.str());
    json h = hull_json(hull);
    h["eps"] = eps;
    writer.json_file("hull_" + format_eps(eps) + ".json", h);
  }

  json entry = {{"eps", eps},
                {"a_eps", a},
                {"points", cloud.size()},
                {"hull_vertices", hull.vertices.size()},
                {"pitch", {{"xi_gap", pitch.xi_gap}, {"leaf_gap", pitch.leaf_gap}, {"pitch", pitch.pitch()}}},
                {"tol", tol}};
  json checks = json::object();
  json classification = json::array();
  double max_defect = 0.0;

  std::optional<LocalProductReport> local;
  std::optional<GlobalReport> global;
  if (model.is_collar() && (s.wants("local") || s.wants("fold") || !s.wants("global")))
    local = check_local_product(cloud, model.leaf, xi, m, a, tol);
  if (s.wants("global") || !model.is_collar())
    global = classify_components(model, cloud, component_a_eps(model, eps), tol, threads);

  if (global) {
    for (const auto& c : global->components) classification.push_back(to_string(c.observed));
    max_defect = global->max_defect();
  } else {
    classification.push_back(local->pass ? (local->odd ? "half_product" : "product") : "unclassified");
    max_defect = local->hausdorff;
  }

  if (local && s.wants("local")) {
    checks["local"] = {{"pass", local->pass},
                       {"odd", local->odd},
                       {"interval", {local->interval_lo, local->interval_hi}},
                       {"hausdorff", local->hausdorff},
                       {"tol", local->tol},
                       {"witness", witness_json(local->witness)},
                       {"hull_vertices", local->hull_vertices}};
    tally.record("local", local->pass, tag);
  }
  if (s.wants("fold")) {
    if (local->odd) {
      const bool pass = local->fold_pass && local->pass && !local->naive_pass;
      checks["fold"] = {{"applicable", true},
                        {"pass", pass},
                        {"fold_defect", local->fold_defect},
                        {"fold_pass", local->fold_pass},
                        {"half_product_pass", local->pass},
                        {"naive_hausdorff", local->naive_hausdorff},
                        {"naive_pass", local->naive_pass}};
      tally.record("fold", pass, tag);
    } else {
      checks["fold"] = {{"applicable", false}, {"pass", true}, {"note", "no fold for even order"}};
      tally.record("fold", true, tag);
    }
  }
  if (global && s.wants("global")) {
    json comps = json::array();
    for (const auto& c : global->components) comps.push_back(component_json(c));
    checks["global"] = {{"pass", global->pass}, {"tol", global->tol}, {"components", comps}};
    tally.record("global", global->pass, tag);
  }
  if (s.wants("convexity")) {
    json parts = json::array();
    bool pass = true;
    if (global) {
      for (const auto& c : global->components) {
        json part = convexity_json(c.convexity);
        part["component"] = c.component;
        parts.push_back(part);
        pass = pass && c.convexity.pass;
      }
    } else {
      const auto c = convexity_check(cloud, tol, threads);
      parts.push_back(convexity_json(c));
      pass = c.pass;
    }
    checks["convexity"] = {{"pass", pass}, {"parts", parts}};
    tally.record("convexity", pass, tag);
  }
  if (s.wants("desing")) {
    const DesingFamily family(m, eps);
    json profiles = json::array();
    bool pass = true;
    for (int j = 1; j <= m; ++j) {
      const auto c = check_desing_contract(family.profile(j), half_width(model.geometry), s.tolerances.desing_relative);
      profiles.push_back({{"order", j},
                          {"pass", c.pass},
                          {"outer_exact", c.outer_exact},
                          {"jet_mismatch", c.jet_mismatch},
                          {"parity", c.parity},
                          {"sign", c.sign}});
      pass = pass && c.pass;
    }
    checks["desing"] = {{"pass", pass}, {"profiles", profiles}};
    tally.record("desing", pass, tag);
  }

  entry["classification"] = classification;
  entry["max_hausdorff_defect"] = max_defect;
  entry["checks"] = checks;
  timing["eps"].push_back({{"eps", eps}, {"seconds", seconds_since(start)}});
  return entry;
}

json run_fit(const Scenario& s, const ScenarioModel& model, CheckTally& tally) {
  const double delta = half_width(model.geometry);
  const int n = s.fit.samples;
  std::vector<std::pair<double, double>> samples;
  for (int side : {-1, 1})
    for (int i = 0; i < n; ++i) {
      const double x = side * (0.1 * delta + 0.9 * delta * i / std::max(1, n - 1));
      samples.emplace_back(x, moment_xi(model, x));
    }
  const auto fit = fit_laurent_coefficients(samples, model.order(), s.fit.smooth_degree);
  const auto w = model.xi_weights();
  double error = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) error = std::max(error, std::abs(fit.w[j] - w[j]));
  const bool pass = error <= s.tolerances.fit;
  tally.record("fit", pass, "");
  return {{"pass", pass}, {"expected_w", w}, {"fitted_w", fit.w}, {"smooth", fit.smooth},
          {"max_weight_error", error}, {"residual", fit.residual}, {"samples", samples.size()}};
}

std::string studies_csv(const std::vector<ConvergenceStudy>& studies) {
  std::string out = "parameter,value,spacing,error\n";
  char buf[128];
  for (const auto& s : studies)
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g\n", s.parameter.c_str(), s.values[i], s.spacing[i], s.errors[i]);
      out += buf;
    }
  return out;
}

json run_moser(const Scenario& s, int threads, const Writer& writer, CheckTally& tally, json& timing) {
  const auto start = Clock::now();
  const auto& spec = *s.moser;
  json out;
  try {
    const auto r = moser_flow(spec.form, spec.steps, threads);
    const bool pass = r.residual <= s.tolerances.moser_residual && r.outer_identity_defect == 0.0;
    out = {{"pass", pass},
           {"residual", r.residual},
           {"residual_tol", s.tolerances.moser_residual},
           {"max_speed", r.max_speed},
           {"outer_identity_defect", r.outer_identity_defect},
           {"germ_defect", r.germ_defect},
           {"grid", {spec.form.nx, spec.form.ntheta}},
           {"steps", spec.steps}};
    tally.record("moser", pass, "");
    std::vector<ConvergenceStudy> studies;
    if (spec.grid_study) {
      studies.push_back(grid_convergence(spec.form, spec.grid_study->sizes, spec.grid_study->steps, threads));
      out["grid_convergence"] = study_json(studies.back(), 2.0, s.tolerances.slope_relative);
      tally.record("moser", out["grid_convergence"]["pass"].get<bool>(), "grid convergence");
    }
    if (spec.time_study) {
      const auto& t = *spec.time_study;
      studies.push_back(step_convergence(t.form, t.steps, t.reference, threads));
      out["step_convergence"] = study_json(studies.back(), 4.0, s.tolerances.slope_relative);
      tally.record("moser", out["step_convergence"]["pass"].get<bool>(), "step convergence");
    }
    if (!studies.empty()) writer.text("moser_convergence.csv", studies_csv(studies));
  } catch (const DegeneracyError& e) {
    out = {{"pass", false}, {"error", "degeneracy"}, {"message", e.what()}};
    tally.record("moser", false, "");
  } catch (const StepSizeError& e) {
    out = {{"pass", false}, {"error", "step_size"}, {"message", e.what()}};
    tally.record("moser", false, "");
  }
  timing["moser_seconds"] = seconds_since(start);
  return out;
}

}  // namespace

std::string format_eps(double eps) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, eps);
  return std::string(buf, res.ptr);
}

void write_points_csv(std::ostream& out, const PointCloud& cloud) {
  std::string line;
  for (int i = 0; i < cloud.dim; ++i) line += "coord_" + std::to_string(i) + ",";
  out << line << "component,side\n";
  char buf[32];
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    line.clear();
    for (int i = 0; i < cloud.dim; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", cloud.points[k](i));
      line += buf;
    }
    line += std::to_string(cloud.component[k]) + "," + std::to_string(cloud.side[k]) + "\n";
    out << line;
  }
}

json hull_json(const Polytope& hull) {
  json vertices = json::array();
  for (const auto& v : hull.vertices) vertices.push_back(point_json(v));
  json facets = json::array();
  for (const auto& f : hull.facets) facets.push_back(halfspace_json(f));
  return {{"dim", hull.dim}, {"affine_dim", hull.affine_dim}, {"vertices", vertices}, {"facets", facets}};
}

RunOutcome run_scenario(const Scenario& s, const RunOptions& options) {
  const auto start = Clock::now();
  RunOutcome outcome;
  json& report = outcome.report;
  report["schema_version"] = kSchemaVersion;
  report["scenario"] = s.name;
  report["checks_requested"] = s.checks;
  json timing = {{"eps", json::array()}};

  std::vector<double> eps_list = s.eps_list;
  if (!options.eps_override.empty()) {
    if (!s.model) throw SchemaError("eps_override", "scenario has no model");
    check_eps_list(options.eps_override, half_width(s.model->geometry), "eps_override");
    eps_list = options.eps_override;
  }
  report["eps_list"] = eps_list;

  const Writer writer(options.out_dir);
  const auto finish = [&](int code, const std::string& message) {
    outcome.exit_code = code;
    outcome.message = message;
    report["exit_code"] = code;
    report["pass"] = code == kExitPass;
    report["message"] = message;
    timing["total_seconds"] = seconds_since(start);
    report["timing"] = timing;
    writer.json_file("report.json", report);
    return outcome;
  };

  // Input validation: Assumptions 1-2 on the model, admissibility of the Moser form.
  json validation = json::array();
  std::string invalid;
  if (s.model) {
    const auto v = validate_assumptions(*s.model);
    for (const auto& e : v.entries) {
      validation.push_back({{"name", e.name}, {"pass", e.pass}, {"message", e.message}});
      if (!e.pass && invalid.empty()) invalid = e.message;
    }
  }
  if (s.moser && s.wants("moser")) {
    try {
      validate_form(s.moser->form);
      if (s.moser->time_study) validate_form(s.moser->time_study->form);
      validation.push_back({{"name", "moser_form"}, {"pass", true}, {"message", "admissible"}});
    } catch (const std::exception& e) {
      validation.push_back({{"name", "moser_form"}, {"pass", false}, {"message", e.what()}});
      if (invalid.empty()) invalid = e.what();
    }
  }
  report["validation"] = validation;
  if (!invalid.empty()) return finish(kExitValidationFailure, invalid);

  CheckTally tally;
  json per_eps = json::array();
  json a_table = json::array();
  const bool image_checks = s.model && std::any_of(s.checks.begin(), s.checks.end(), [](const std::string& c) {
                              return c != "moser" && c != "fit";
                            });
  if (s.model) {
    for (double eps : eps_list) {
      if (image_checks) {
        per_eps.push_back(run_eps(s, *s.model, eps, options.threads, writer, tally, timing));
        a_table.push_back({{"eps", eps}, {"a_eps", per_eps.back()["a_eps"]}});
      } else {
        a_table.push_back({{"eps", eps}, {"a_eps", compute_a_eps(*s.model, eps)}});
      }
    }
  }
  report["per_eps"] = per_eps;
  report["a_eps_table"] = a_table;
  if (s.wants("fit")) report["fit"] = run_fit(s, *s.model, tally);
  if (s.wants("moser")) report["moser"] = run_moser(s, options.threads, writer, tally, timing);
  report["check_results"] = tally.summary;
  return finish(tally.all_pass() ? kExitPass : kExitCheckFailure, tally.first_failure);
}

std::string describe_scenario(const Scenario& s, int threads) {
  std::ostringstream out;
  out.precision(10);
  out << "name:        " << s.name << "\n";
  if (!s.description.empty()) out << "description: " << s.description << "\n";
  out << "checks:      ";
  for (std::size_t i = 0; i < s.checks.size(); ++i) out << (i ? ", " : "") << s.checks[i];
  out << "\n";
  if (s.model) {
    const auto& m = *s.model;
    out << "geometry:    " << geometry_kind(m.geometry);
    if (const auto* c = std::get_if<CollarGeometry>(&m.geometry)) out << " (delta = " << c->delta << ")";
    if (const auto* c = std::get_if<CircleGluedModel>(&m.geometry)) out << " (" << c->zero_count << " zeros)";
    out << "\n";
    out << "torus:       T^" << m.torus.dim << ", xi = e_" << m.torus.xi_index << "\n";
    out << "order m:     " << m.order() << "\n";
    out << "xi weights:  ";
    const auto w = m.xi_weights();
    for (std::size_t i = 0; i < w.size(); ++i) out << (i ? ", " : "") << w[i];
    out << "\n";
    out << "leaf:        " << m.leaf.vertices().size() << " vertices in R^" << m.torus.dim - 1 << "\n";
    out << "cuts:        " << m.cuts.size() << "\n";
    out << "resolution:  n_collar = " << s.resolution.n_collar << ", n_leaf = " << s.resolution.n_leaf << "\n";
    out << "eps_list:    ";
    for (std::size_t i = 0; i < s.eps_list.size(); ++i) out << (i ? ", " : "") << format_eps(s.eps_list[i]);
    out << "\n";
    out << "per eps (grid pitch, tolerance):\n";
    for (double eps : s.eps_list) {
      const auto cloud = sample_image(m, eps, s.resolution, threads);
      const auto p = grid_pitch(cloud, m.torus.xi_index);
      const double tol = s.tolerances.absolute ? *s.tolerances.absolute : s.tolerances.pitch_factor * p.pitch();
      out << "  eps = " << format_eps(eps) << ": points = " << cloud.size() << ", xi gap = " << p.xi_gap
          << ", leaf gap = " << p.leaf_gap << ", pitch = " << p.pitch() << ", tol = " << tol
          << ", a_eps = " << compute_a_eps(m, eps) << "\n";
    }
  }
  if (s.moser) {
    const auto& f = s.moser->form;
    out << "moser:       m = " << f.m << ", delta = " << f.delta << ", grid " << f.nx << " x " << f.ntheta
        << " (dx = " << 2 * f.delta / (f.nx - 1) << "), steps = " << s.moser->steps << ", modes = " << f.modes.size()
        << "\n";
  }
  return out.str();
}

std::vector<ScenarioListing> list_scenarios(const std::filesystem::path& dir) {
  std::vector<ScenarioListing> out;
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ScenarioListing l;
    l.path = entry.path();
    try {
      const auto s = load_scenario(entry.path());
      l.name = s.name;
      l.description = s.description;
    } catch (const std::exception& e) {
      l.error = e.what();
    }
    out.push_back(l);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path.filename() < b.path.filename(); });
  return out;
}

}  // namespace bm

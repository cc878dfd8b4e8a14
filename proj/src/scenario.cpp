#include "bm/scenario.hpp"

#include "bm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bm {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join(path, key), "missing required field");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<int>();
}

int positive_integer(const json& v, const std::string& path) {
  const int n = integer(v, path);
  if (n < 1) throw SchemaError(path, "expected a positive integer");
  return n;
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SchemaError(path, "expected true or false");
  return v.get<bool>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(number(v[i], index(path, i)));
  return out;
}

std::vector<int> positive_integers(const json& v, const std::string& path) {
  std::vector<int> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i)
    out.push_back(positive_integer(v[i], index(path, i)));
  return out;
}

Eigen::VectorXd vector(const json& v, std::size_t size, const std::string& path) {
  const auto xs = numbers(v, path);
  if (xs.size() != size)
    throw SchemaError(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(xs.size()));
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  for (const auto& [key, value] : obj.items())
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw SchemaError(join(path, key), "unknown field");
}

ModelGeometry parse_geometry(const json& g, const std::string& path) {
  const std::string kind = string(require(g, "kind", path), join(path, "kind"));
  if (kind == "collar") {
    reject_unknown(g, {"kind", "delta"}, path);
    CollarGeometry c;
    if (const auto* d = optional_field(g, "delta")) c.delta = number(*d, join(path, "delta"));
    if (!(c.delta > 0)) throw SchemaError(join(path, "delta"), "must be positive");
    return c;
  }
  if (kind == "circle") {
    reject_unknown(g, {"kind", "zeros"}, path);
    CircleGluedModel c;
    if (const auto* z = optional_field(g, "zeros")) c.zero_count = integer(*z, join(path, "zeros"));
    return c;
  }
  if (kind == "sphere") {
    reject_unknown(g, {"kind"}, path);
    return SphereModel{};
  }
  throw SchemaError(join(path, "kind"), "unknown geometry kind '" + kind + "' (collar, circle, sphere)");
}

ScenarioModel parse_model(const json& m, const std::string& path) {
  reject_unknown(m, {"torus", "weights", "leaf", "geometry", "cuts"}, path);
  ScenarioModel model;

  const std::string tpath = join(path, "torus");
  const json& torus = require(m, "torus", path);
  reject_unknown(torus, {"dim", "xi_index"}, tpath);
  model.torus.dim = positive_integer(require(torus, "dim", tpath), join(tpath, "dim"));
  model.torus.xi_index = 0;
  if (const auto* xi = optional_field(torus, "xi_index")) model.torus.xi_index = integer(*xi, join(tpath, "xi_index"));
  if (model.torus.xi_index < 0 || model.torus.xi_index >= model.torus.dim)
    throw SchemaError(join(tpath, "xi_index"), "must lie in [0, dim)");
  const auto d = static_cast<std::size_t>(model.torus.dim);

  // A weight is either a vector in R^d or a number, shorthand for w * e_xi.
  const std::string wpath = join(path, "weights");
  const json& weights = array(require(m, "weights", path), wpath);
  if (weights.empty()) throw SchemaError(wpath, "at least one weight (m >= 1) is required");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].is_number()) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(model.torus.dim);
      a(model.torus.xi_index) = number(weights[i], index(wpath, i));
      model.weights.a.push_back(a);
    } else {
      model.weights.a.push_back(vector(weights[i], d, index(wpath, i)));
    }
  }

  const std::string lpath = join(path, "leaf");
  const json& leaf = require(m, "leaf", path);
  reject_unknown(leaf, {"vertices"}, lpath);
  const std::string vpath = join(lpath, "vertices");
  const json& vertices = array(require(leaf, "vertices", lpath), vpath);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < vertices.size(); ++i) pts.push_back(vector(vertices[i], d - 1, index(vpath, i)));
  try {
    model.leaf = LeafPolytope(std::move(pts));
  } catch (const std::exception& e) {
    throw SchemaError(vpath, e.what());
  }

  model.geometry = parse_geometry(require(m, "geometry", path), join(path, "geometry"));

  if (const auto* cuts = optional_field(m, "cuts")) {
    const std::string cpath = join(path, "cuts");
    for (std::size_t i = 0; i < array(*cuts, cpath).size(); ++i) {
      const json& c = (*cuts)[i];
      const std::string p = index(cpath, i);
      reject_unknown(c, {"normal", "offset", "component"}, p);
      Eigen::VectorXd normal = vector(require(c, "normal", p), d, join(p, "normal"));
      const double norm = normal.norm();
      if (!(norm > 0)) throw SchemaError(join(p, "normal"), "must be nonzero");
      ImageCut cut;
      cut.half.normal = normal / norm;
      cut.half.offset = number(require(c, "offset", p), join(p, "offset")) / norm;
      if (const auto* comp = optional_field(c, "component")) cut.component = integer(*comp, join(p, "component"));
      model.cuts.push_back(cut);
    }
  }
  return model;
}

std::vector<DensityMode> parse_modes(const json& v, const std::string& path) {
  std::vector<DensityMode> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) {
    const json& m = v[i];
    const std::string p = index(path, i);
    reject_unknown(m, {"amplitude", "power", "frequency", "trig", "cutoff"}, p);
    DensityMode mode;
    mode.amplitude = number(require(m, "amplitude", p), join(p, "amplitude"));
    if (const auto* x = optional_field(m, "power")) mode.power = integer(*x, join(p, "power"));
    if (const auto* x = optional_field(m, "frequency")) mode.frequency = integer(*x, join(p, "frequency"));
    if (const auto* x = optional_field(m, "trig")) {
      const std::string t = string(*x, join(p, "trig"));
      if (t != "sin" && t != "cos") throw SchemaError(join(p, "trig"), "expected 'sin' or 'cos'");
      mode.sine = t == "sin";
    }
    if (const auto* x = optional_field(m, "cutoff")) mode.cutoff = boolean(*x, join(p, "cutoff"));
    out.push_back(mode);
  }
  return out;
}

// Fields of a Moser form; missing ones keep the values of `form`.
void parse_form_fields(const json& j, const std::string& path, Collar2DForm& form) {
  if (const auto* x = optional_field(j, "m")) form.m = positive_integer(*x, join(path, "m"));
  if (const auto* x = optional_field(j, "delta")) {
    form.delta = number(*x, join(path, "delta"));
    if (!(form.delta > 0)) throw SchemaError(join(path, "delta"), "must be positive");
  }
  if (const auto* x = optional_field(j, "grid")) {
    const auto g = positive_integers(*x, join(path, "grid"));
    if (g.size() != 2) throw SchemaError(join(path, "grid"), "expected [nx, ntheta]");
    form.nx = g[0];
    form.ntheta = g[1];
  }
  if (const auto* x = optional_field(j, "base")) form.base = numbers(*x, join(path, "base"));
  if (const auto* x = optional_field(j, "modes")) form.modes = parse_modes(*x, join(path, "modes"));
}

MoserSpec parse_moser(const json& j, const std::string& path) {
  reject_unknown(j, {"m", "delta", "grid", "steps", "base", "modes", "convergence"}, path);
  MoserSpec spec;
  spec.form.base = {1.0};
  parse_form_fields(j, path, spec.form);
  if (const auto* x = optional_field(j, "steps")) spec.steps = positive_integer(*x, join(path, "steps"));
  if (const auto* conv = optional_field(j, "convergence")) {
    const std::string cpath = join(path, "convergence");
    reject_unknown(*conv, {"grid", "time"}, cpath);
    if (const auto* g = optional_field(*conv, "grid")) {
      const std::string p = join(cpath, "grid");
      reject_unknown(*g, {"sizes", "steps"}, p);
      MoserGridStudy study;
      study.sizes = positive_integers(require(*g, "sizes", p), join(p, "sizes"));
      if (study.sizes.size() < 2) throw SchemaError(join(p, "sizes"), "at least two sizes are needed for a slope");
      if (const auto* s = optional_field(*g, "steps")) study.steps = positive_integer(*s, join(p, "steps"));
      spec.grid_study = study;
    }
    if (const auto* t = optional_field(*conv, "time")) {
      const std::string p = join(cpath, "time");
      reject_unknown(*t, {"steps", "reference", "form"}, p);
      MoserTimeStudy study;
      study.steps = positive_integers(require(*t, "steps", p), join(p, "steps"));
      if (study.steps.size() < 2) throw SchemaError(join(p, "steps"), "at least two step counts are needed for a slope");
      if (const auto* r = optional_field(*t, "reference")) study.reference = positive_integer(*r, join(p, "reference"));
      study.form = spec.form;
      if (const auto* f = optional_field(*t, "form")) {
        reject_unknown(*f, {"m", "delta", "grid", "base", "modes"}, join(p, "form"));
        parse_form_fields(*f, join(p, "form"), study.form);
      }
      spec.time_study = study;
    }
  }
  return spec;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

bool Scenario::wants(std::string_view check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

double half_width(const ModelGeometry& geometry) {
  if (const auto* c = std::get_if<CollarGeometry>(&geometry)) return c->delta;
  return 1.0;
}

std::string geometry_kind(const ModelGeometry& geometry) {
  return std::visit(
      [](const auto& g) -> std::string {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CollarGeometry>) return "collar";
        else if constexpr (std::is_same_v<G, CircleGluedModel>) return "circle";
        else return "sphere";
      },
      geometry);
}

void check_eps_list(const std::vector<double>& eps, double limit, const std::string& field) {
  if (eps.empty()) throw SchemaError(field, "must not be empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw SchemaError(index(field, i), "eps must be positive");
    if (!(eps[i] < limit)) {
      std::ostringstream msg;
      msg << "eps must be below the collar half-width " << limit;
      throw SchemaError(index(field, i), msg.str());
    }
    if (i > 0 && !(eps[i] < eps[i - 1])) throw SchemaError(index(field, i), "eps_list must be strictly decreasing");
  }
}

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string detail = e.what();
    if (const auto pos = detail.find("syntax error"); pos != std::string::npos) detail = detail.substr(pos);
    throw SchemaError("", "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                              ": " + detail);
  }
  if (!root.is_object()) throw SchemaError("", "scenario must be a JSON object");
  reject_unknown(root, {"schema_version", "name", "description", "model", "eps_list", "resolution",
                        "tolerances", "checks", "moser", "fit"},
                 "");

  Scenario s;
  s.schema_version = integer(require(root, "schema_version", ""), "schema_version");
  if (s.schema_version != kSchemaVersion)
    throw SchemaError("schema_version", "unsupported version " + std::to_string(s.schema_version) +
                                            " (expected " + std::to_string(kSchemaVersion) + ")");
  s.name = string(require(root, "name", ""), "name");
  if (s.name.empty()) throw SchemaError("name", "must not be empty");
  if (const auto* d = optional_field(root, "description")) s.description = string(*d, "description");

  const json& checks = array(require(root, "checks", ""), "checks");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string c = string(checks[i], index("checks", i));
    if (std::find(kCheckNames.begin(), kCheckNames.end(), c) == kCheckNames.end())
      throw SchemaError(index("checks", i), "unknown check '" + c + "'");
    if (s.wants(c)) throw SchemaError(index("checks", i), "duplicate check '" + c + "'");
    s.checks.push_back(c);
  }
  if (s.checks.empty()) throw SchemaError("checks", "must name at least one check");

  const bool needs_model = std::any_of(s.checks.begin(), s.checks.end(), [](const std::string& c) { return c != "moser"; });
  if (const auto* m = optional_field(root, "model")) s.model = parse_model(*m, "model");
  else if (needs_model) throw SchemaError("model", "missing required field");

  if (const auto* r = optional_field(root, "resolution")) {
    reject_unknown(*r, {"n_collar", "n_leaf"}, "resolution");
    if (const auto* x = optional_field(*r, "n_collar")) s.resolution.n_collar = positive_integer(*x, "resolution.n_collar");
    if (const auto* x = optional_field(*r, "n_leaf")) s.resolution.n_leaf = positive_integer(*x, "resolution.n_leaf");
  }

  if (const auto* t = optional_field(root, "tolerances")) {
    reject_unknown(*t, {"absolute", "pitch_factor", "desing_relative", "moser_residual", "slope_relative", "fit"},
                   "tolerances");
    auto& tol = s.tolerances;
    const auto positive = [&](const char* key, double& out) {
      if (const auto* x = optional_field(*t, key)) {
        out = number(*x, join("tolerances", key));
        if (!(out > 0)) throw SchemaError(join("tolerances", key), "must be positive");
      }
    };
    if (optional_field(*t, "absolute")) {
      double a = 0;
      positive("absolute", a);
      tol.absolute = a;
    }
    positive("pitch_factor", tol.pitch_factor);
    positive("desing_relative", tol.desing_relative);
    positive("moser_residual", tol.moser_residual);
    positive("slope_relative", tol.slope_relative);
    positive("fit", tol.fit);
  }

  if (const auto* e = optional_field(root, "eps_list")) s.eps_list = numbers(*e, "eps_list");
  if (s.model) check_eps_list(s.eps_list, half_width(s.model->geometry), "eps_list");
  else if (!s.eps_list.empty()) throw SchemaError("eps_list", "requires a model");

  if (s.model && !s.model->is_collar())
    for (const char* c : {"local", "fold", "fit"})
      if (s.wants(c)) throw SchemaError("checks", std::string("check '") + c + "' requires geometry kind 'collar'");

  if (const auto* m = optional_field(root, "moser")) s.moser = parse_moser(*m, "moser");
  if (s.wants("moser") && !s.moser) throw SchemaError("moser", "check 'moser' requires a moser block");

  if (const auto* f = optional_field(root, "fit")) {
    reject_unknown(*f, {"samples", "smooth_degree"}, "fit");
    if (const auto* x = optional_field(*f, "samples")) s.fit.samples = positive_integer(*x, "fit.samples");
    if (const auto* x = optional_field(*f, "smooth_degree")) {
      s.fit.smooth_degree = integer(*x, "fit.smooth_degree");
      if (s.fit.smooth_degree < 0) throw SchemaError("fit.smooth_degree", "must be >= 0");
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

namespace {

json form_json(const Collar2DForm& f) {
  json modes = json::array();
  for (const auto& m : f.modes)
    modes.push_back({{"amplitude", m.amplitude}, {"power", m.power}, {"frequency", m.frequency},
                     {"trig", m.sine ? "sin" : "cos"}, {"cutoff", m.cutoff}});
  return {{"m", f.m}, {"delta", f.delta}, {"grid", {f.nx, f.ntheta}}, {"base", f.base}, {"modes", modes}};
}

}  // namespace

json to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["description"] = s.description;
  if (s.model) {
    const auto& m = *s.model;
    json weights = json::array();
    for (const auto& a : m.weights.a) weights.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    json leaf = json::array();
    for (const auto& v : m.leaf.vertices()) leaf.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    json geometry = {{"kind", geometry_kind(m.geometry)}};
    if (const auto* c = std::get_if<CollarGeometry>(&m.geometry)) geometry["delta"] = c->delta;
    if (const auto* c = std::get_if<CircleGluedModel>(&m.geometry)) geometry["zeros"] = c->zero_count;
    json cuts = json::array();
    for (const auto& c : m.cuts) {
      json cut = {{"normal", std::vector<double>(c.half.normal.data(), c.half.normal.data() + c.half.normal.size())},
                  {"offset", c.half.offset}};
      if (c.component) cut["component"] = *c.component;
      cuts.push_back(cut);
    }
    j["model"] = {{"torus", {{"dim", m.torus.dim}, {"xi_index", m.torus.xi_index}}},
                  {"weights", weights},
                  {"leaf", {{"vertices", leaf}}},
                  {"geometry", geometry},
                  {"cuts", cuts}};
  }
  j["eps_list"] = s.eps_list;
  j["resolution"] = {{"n_collar", s.resolution.n_collar}, {"n_leaf", s.resolution.n_leaf}};
  json tol = {{"pitch_factor", s.tolerances.pitch_factor},
              {"desing_relative", s.tolerances.desing_relative},
              {"moser_residual", s.tolerances.moser_residual},
              {"slope_relative", s.tolerances.slope_relative},
              {"fit", s.tolerances.fit}};
  if (s.tolerances.absolute) tol["absolute"] = *s.tolerances.absolute;
  j["tolerances"] = tol;
  j["checks"] = s.checks;
  if (s.moser) {
    json m = form_json(s.moser->form);
    m["steps"] = s.moser->steps;
    if (s.moser->grid_study) m["convergence"]["grid"] = {{"sizes", s.moser->grid_study->sizes}, {"steps", s.moser->grid_study->steps}};
    if (s.moser->time_study)
      m["convergence"]["time"] = {{"steps", s.moser->time_study->steps},
                                  {"reference", s.moser->time_study->reference},
                                  {"form", form_json(s.moser->time_study->form)}};
    j["moser"] = m;
  }
  j["fit"] = {{"samples", s.fit.samples}, {"smooth_degree", s.fit.smooth_degree}};
  return j;
}

}  // namespace bm

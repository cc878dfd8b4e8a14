#include "bm/hamiltonian.hpp"

#include "bm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bm {
namespace {

constexpr double kPi = std::numbers::pi;

// Antiderivative of csc^n on (0, pi) + k*pi, by the reduction formula.
double csc_power_integral(int n, double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  if (n == 1) return std::log(std::abs(std::tan(0.5 * phi)));
  if (n == 2) return -c / s;
  return -c * std::pow(s, -(n - 1)) / (n - 1) +
         static_cast<double>(n - 2) / (n - 1) * csc_power_integral(n - 2, phi);
}

// Ordered corners of a 2-D polygon, walked along its boundary edges.
std::vector<Point> polygon_cycle(const Polytope& hull) {
  const auto n = hull.vertices.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : hull.edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  std::vector<Point> out;
  int prev = -1, cur = 0;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(hull.vertices[cur]);
    const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
    prev = cur;
    cur = next;
  }
  return out;
}

void append_unique(std::vector<Point>& pts, const Point& p) {
  for (const auto& q : pts)
    if ((q - p).lpNorm<Eigen::Infinity>() <= kDedupTolerance) return;
  pts.push_back(p);
}

std::vector<Point> sample_segment(const Point& a, const Point& b, int n) {
  std::vector<Point> out{a};
  for (int i = 1; i + 1 < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out.push_back((1.0 - t) * a + t * b);
  }
  out.push_back(b);
  return out;
}

double pole_value(const ScenarioModel& model, double sign) {
  const auto w = model.xi_weights();
  return singular_primitive(w, sign);
}

}  // namespace

std::vector<double> ModularWeights::xi_weights(int xi_index) const {
  std::vector<double> w;
  w.reserve(a.size());
  for (const auto& v : a) {
    if (xi_index < 0 || xi_index >= v.size())
      throw DimensionError("weights: xi_index outside the torus dimension");
    w.push_back(v[xi_index]);
  }
  return w;
}

LeafPolytope::LeafPolytope(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  dim_ = vertices_.empty() ? 0 : static_cast<int>(vertices_.front().size());
  for (const auto& v : vertices_)
    if (v.size() != dim_) throw DimensionError("leaf polytope: vertices differ in dimension");
  if (dim_ >= 1 && dim_ <= 3 && !vertices_.empty()) hull_ = convex_hull(vertices_, dim_);
}

const std::vector<Point>& LeafPolytope::extreme_points() const {
  static const std::vector<Point> origin{Point(0)};
  return dim_ == 0 ? origin : hull_.vertices;
}

bool LeafPolytope::contains(const Point& p, double tol) const {
  if (p.size() != dim_) return false;
  if (dim_ == 0) return true;
  return hull_.contains(p, tol);
}

std::vector<Point> LeafPolytope::sample(int n_leaf) const {
  if (n_leaf < 1) throw ResolutionError("leaf sampling needs n_leaf >= 1");
  if (dim_ == 0) return {Point(0)};
  const auto& hv = hull_.vertices;
  if (hull_.affine_dim == 0) return {hv.front()};
  if (hull_.affine_dim == 1) {
    // The extreme pair of a segment hull is its vertex list.
    return sample_segment(hv.front(), hv.back(), std::max(n_leaf, 2));
  }
  if (dim_ != 2) throw DimensionError("leaf sampling supports polytopes of dimension <= 2");
  const auto corners = polygon_cycle(hull_);
  const int L = std::max(n_leaf - 1, 1);
  std::vector<Point> out;
  for (std::size_t t = 1; t + 1 < corners.size(); ++t) {
    const Point& a = corners[0];
    const Point& b = corners[t];
    const Point& c = corners[t + 1];
    for (int i = 0; i <= L; ++i)
      for (int j = 0; i + j <= L; ++j) {
        const int k = L - i - j;
        append_unique(out, (static_cast<double>(i) / L) * a + (static_cast<double>(j) / L) * b +
                               (static_cast<double>(k) / L) * c);
      }
  }
  return out;
}

double defining_function(const ModelGeometry& geometry, double base) {
  if (const auto* circle = std::get_if<CircleGluedModel>(&geometry))
    return std::sin(0.5 * circle->zero_count * base);
  return base;
}

std::vector<double> zero_set(const ModelGeometry& geometry) {
  if (const auto* circle = std::get_if<CircleGluedModel>(&geometry)) {
    std::vector<double> z;
    for (int i = 0; i < circle->zero_count; ++i) z.push_back(2.0 * kPi * i / circle->zero_count);
    return z;
  }
  return {0.0};
}

std::vector<ComponentSegment> component_segments(const ScenarioModel& model) {
  if (const auto* collar = std::get_if<CollarGeometry>(&model.geometry))
    return {{0, -collar->delta, 0.0, -1, 0, 0.0}, {1, 0.0, collar->delta, 0, -1, 0.0}};
  if (std::holds_alternative<SphereModel>(model.geometry))
    return {{0, -1.0, 0.0, -1, 0, -1.0}, {1, 0.0, 1.0, 0, -1, 1.0}};
  const int r = std::get<CircleGluedModel>(model.geometry).zero_count;
  std::vector<ComponentSegment> out;
  for (int i = 0; i < r; ++i) {
    const double lo = 2.0 * kPi * i / r, hi = 2.0 * kPi * (i + 1) / r;
    out.push_back({i, lo, hi, i, (i + 1) % r, 0.5 * (lo + hi)});
  }
  return out;
}

int component_of(const ScenarioModel& model, double base) {
  if (defining_function(model.geometry, base) == 0.0)
    throw PoleError("component_of: point lies on Z");
  if (const auto* circle = std::get_if<CircleGluedModel>(&model.geometry)) {
    double t = std::fmod(base, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    return std::min(static_cast<int>(t * circle->zero_count / (2.0 * kPi)),
                    circle->zero_count - 1);
  }
  return base < 0 ? 0 : 1;
}

CollarModel make_collar_model(const ScenarioModel& model) {
  const auto* collar = std::get_if<CollarGeometry>(&model.geometry);
  if (!collar) throw std::invalid_argument("make_collar_model: scenario is not a collar model");
  return CollarModel(model.order(), collar->delta, model.leaf.dim(), LaurentData{model.weights.a, {}});
}

double moment_xi(const ScenarioModel& model, double x_or_theta) {
  const double f = defining_function(model.geometry, x_or_theta);
  if (f == 0.0) throw PoleError("moment_eval: evaluation on Z");
  const auto w = model.xi_weights();
  if (std::holds_alternative<CollarGeometry>(model.geometry)) return singular_primitive(w, f);
  if (std::holds_alternative<SphereModel>(model.geometry))
    return singular_primitive(w, f) - pole_value(model, f < 0 ? -1.0 : 1.0);

  const int r = std::get<CircleGluedModel>(model.geometry).zero_count;
  const auto seg = component_segments(model)[component_of(model, x_or_theta)];
  // Shift theta into the component's own interval so the closed forms stay on one branch.
  double theta = x_or_theta - 2.0 * kPi * std::floor(x_or_theta / (2.0 * kPi));
  theta = std::clamp(theta, seg.lo, seg.hi);
  const double phi = 0.5 * r * theta, phi_mid = 0.5 * r * seg.center;
  const auto c = moment_density_coefficients(w);
  double sum = 0.0;
  for (std::size_t j = 1; j <= c.size(); ++j) {
    if (c[j - 1] == 0.0) continue;
    const int n = static_cast<int>(j);
    sum += c[j - 1] * (csc_power_integral(n, phi) - csc_power_integral(n, phi_mid));
  }
  return 2.0 / r * sum;
}

Eigen::VectorXd moment_eval(const ScenarioModel& model, double x_or_theta, const Point& leaf_point) {
  if (leaf_point.size() != model.torus.dim - 1)
    throw DimensionError("moment_eval: leaf point has the wrong dimension");
  if (!model.leaf.contains(leaf_point))
    throw MembershipError("moment_eval: leaf point lies outside the leaf polytope");
  return insert_coordinate(leaf_point, model.torus.xi_index, moment_xi(model, x_or_theta));
}

bool ValidationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

const AssumptionEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

ValidationReport validate_assumptions(const ScenarioModel& model) {
  ValidationReport report;
  const int d = model.torus.dim;
  const int xi = model.torus.xi_index;

  {
    AssumptionEntry e{"torus", true, "ok"};
    if (d < 1 || d > 3) {
      e = {"torus", false, "torus dimension must lie in [1, 3]"};
    } else if (xi < 0 || xi >= d) {
      e = {"torus", false, "xi_index must lie in [0, d)"};
    } else if (model.order() < 1) {
      e = {"torus", false, "at least one modular weight is required (m >= 1)"};
    } else {
      for (const auto& a : model.weights.a)
        if (a.size() != d) e = {"torus", false, "every weight a_i must have length d"};
    }
    report.entries.push_back(e);
    if (!e.pass) return report;
  }

  const auto w = model.xi_weights();
  if (w.back() != 0.0 && std::isfinite(w.back()))
    report.entries.push_back({"assumption_1", true, "a_m(xi) = " + std::to_string(w.back())});
  else
    report.entries.push_back(
        {"assumption_1", false, "Assumption 1 violated: a_m(xi) = 0 (w_m must be nonzero)"});

  {
    AssumptionEntry e{"annihilator", true, "every a_i annihilates t_L"};
    for (int i = 0; i < model.order(); ++i) {
      const auto& a = model.weights.a[i];
      const double scale = std::max(1.0, a.lpNorm<Eigen::Infinity>());
      for (int k = 0; k < d; ++k)
        if (k != xi && std::abs(a[k]) > 1e-12 * scale) {
          std::ostringstream msg;
          msg << "annihilator constraint violated: <a_" << i + 1 << ", e_" << k << "> = " << a[k]
              << " (a_i must vanish on t_L)";
          e = {"annihilator", false, msg.str()};
          break;
        }
      if (!e.pass) break;
    }
    report.entries.push_back(e);
  }

  {
    AssumptionEntry e{"leaf_polytope", true, ""};
    const auto& leaf = model.leaf;
    if (leaf.dim() != d - 1) {
      e = {"leaf_polytope", false,
           "Assumption 2 input invalid: leaf polytope dimension must be d - 1 = " +
               std::to_string(d - 1)};
    } else if (d > 1 && leaf.vertices().empty()) {
      e = {"leaf_polytope", false, "Assumption 2 input invalid: leaf polytope has no vertices"};
    } else {
      bool finite = true;
      for (const auto& v : leaf.vertices()) finite = finite && v.allFinite();
      if (!finite)
        e = {"leaf_polytope", false, "Assumption 2 input invalid: non-finite leaf vertex"};
      else
        e.message = "compact leaf polytope with " + std::to_string(leaf.extreme_points().size()) +
                    " extreme point(s)";
    }
    report.entries.push_back(e);
  }

  {
    AssumptionEntry e{"transversality", true, ""};
    if (const auto* collar = std::get_if<CollarGeometry>(&model.geometry)) {
      if (!(collar->delta > 0.0) || !std::isfinite(collar->delta))
        e = {"transversality", false, "collar half-width delta must be positive"};
    } else if (const auto* circle = std::get_if<CircleGluedModel>(&model.geometry)) {
      if (circle->zero_count < 2 || circle->zero_count % 2 != 0)
        e = {"transversality", false,
             "circle model needs an even, positive number of zeros for f to be single-valued"};
    }
    if (e.pass) {
      const auto zeros = zero_set(model.geometry);
      const double h = 1e-6;
      for (double z : zeros) {
        const double slope = (defining_function(model.geometry, z + h) -
                              defining_function(model.geometry, z - h)) /
                             (2 * h);
        if (std::abs(defining_function(model.geometry, z)) > 1e-12 || std::abs(slope) < 1e-8) {
          e = {"transversality", false, "zero of f at " + std::to_string(z) + " is not simple"};
          break;
        }
      }
      if (e.pass)
        e.message = std::to_string(zeros.size()) + " simple zero(s) of the defining function";
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace bm

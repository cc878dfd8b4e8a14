#pragma once

// Torus action data, modular weights, leaf polytope and the moment map
//   mu = a_1 log|f| + sum_{i>=2} a_i f^{-(i-1)}/(i-1) + mu_0
// on collar and glued model manifolds.

#include "bm/collar_model.hpp"
#include "bm/geometry.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bm {

/// T = T^d with a distinguished circle direction xi = e_{xi_index}; the other
/// coordinates span t_L.
struct TorusData {
  int dim = 1;
  int xi_index = 0;
};

/// a_1..a_m in t* = R^d.
struct ModularWeights {
  std::vector<Eigen::VectorXd> a;

  int order() const { return static_cast<int>(a.size()); }
  /// w_i = <a_i, xi>.
  std::vector<double> xi_weights(int xi_index) const;
};

/// Image Delta of the leaf moment map, given by vertices in R^{d-1}.
class LeafPolytope {
 public:
  LeafPolytope() = default;
  explicit LeafPolytope(std::vector<Point> vertices);

  int dim() const { return dim_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  /// Hull of the vertices (dim() >= 1 only).
  const Polytope& hull() const { return hull_; }
  /// Extreme points of Delta (the single point when dim() == 0).
  const std::vector<Point>& extreme_points() const;
  bool contains(const Point& p, double tol = 1e-9) const;

  /// Regular grid on Delta: n_leaf equispaced points on a segment, a barycentric grid
  /// with n_leaf points per edge on each fan triangle of a polygon, always including
  /// every vertex. Deduplicated, in deterministic order.
  std::vector<Point> sample(int n_leaf) const;

 private:
  int dim_ = 0;
  std::vector<Point> vertices_;
  Polytope hull_;
};

/// Single Z component on a collar (-delta, delta) with f = x.
struct CollarGeometry {
  double delta = 0.5;
};

/// Global model S^1_theta x T x L: f(theta) = sin(zero_count * theta / 2) with
/// zero_count equally spaced simple zeros, and xi-density sum_j c_j / f(theta)^j.
struct CircleGluedModel {
  int zero_count = 2;
};

/// Sphere-type model: height h in [-1, 1], f(h) = h, with the poles h = +-1 fixed by
/// the xi-circle. Each hemisphere has a single Z boundary.
struct SphereModel {};

using ModelGeometry = std::variant<CollarGeometry, CircleGluedModel, SphereModel>;

/// A half-space restriction of the sampled image, optionally limited to one component.
struct ImageCut {
  HalfSpace half;
  std::optional<int> component;

  bool applies_to(int comp) const { return !component || *component == comp; }
};

/// Closure of one connected component of M \ Z, as an interval of the base coordinate.
struct ComponentSegment {
  int index = 0;
  double lo = 0.0, hi = 0.0;
  int zero_lo = -1, zero_hi = -1;  ///< Z component at each end, -1 if none
  double center = 0.0;             ///< base point where the xi-component is centered to 0

  int boundary_zero_count() const { return (zero_lo >= 0) + (zero_hi >= 0); }
};

struct ScenarioModel {
  TorusData torus;
  ModularWeights weights;
  LeafPolytope leaf;
  ModelGeometry geometry;
  std::vector<ImageCut> cuts;

  int order() const { return weights.order(); }
  std::vector<double> xi_weights() const { return weights.xi_weights(torus.xi_index); }
  bool is_collar() const { return std::holds_alternative<CollarGeometry>(geometry); }
};

/// Defining function f at a base coordinate.
double defining_function(const ModelGeometry& geometry, double base);
/// Base coordinates of the zeros of f.
std::vector<double> zero_set(const ModelGeometry& geometry);
/// Components of M \ Z in base-coordinate order. The collar yields the two sides of Z.
std::vector<ComponentSegment> component_segments(const ScenarioModel& model);
/// Component containing a base coordinate off Z.
int component_of(const ScenarioModel& model, double base);

/// Collar Laurent model of a collar scenario: alpha_j are the weights a_j.
CollarModel make_collar_model(const ScenarioModel& model);

/// Moment map (undesingularized) at a base coordinate off Z and a point of Delta.
/// Throws PoleError on Z and MembershipError when leaf_point is outside Delta.
Eigen::VectorXd moment_eval(const ScenarioModel& model, double x_or_theta, const Point& leaf_point);

/// xi-component of the undesingularized moment map (centered per component).
double moment_xi(const ScenarioModel& model, double x_or_theta);

struct AssumptionEntry {
  std::string name;
  bool pass = false;
  std::string message;
};

struct ValidationReport {
  std::vector<AssumptionEntry> entries;

  bool all_pass() const;
  const AssumptionEntry* find(const std::string& name) const;
};

/// Checks w_m != 0 (Assumption 1), <a_i, t_L> = 0, leaf polytope validity
/// (Assumption 2 input) and transversality of the zeros of f.
ValidationReport validate_assumptions(const ScenarioModel& model);

}  // namespace bm

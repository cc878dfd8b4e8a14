#pragma once

// Convex bodies and point clouds in dimension <= 3.

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace bm {

using Point = Eigen::VectorXd;

/// Half-space {y : normal . y <= offset}; normal has unit length.
struct HalfSpace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  double violation(const Point& p) const { return normal.dot(p) - offset; }
};

/// Sampled moment image: one point per row, with provenance tags.
struct PointCloud {
  int dim = 0;
  std::vector<Point> points;
  std::vector<int> component;  ///< index of the connected component of M \ Z
  std::vector<int> side;       ///< -1 / +1: nearer the lower / upper Z boundary (collar: sign of x); 0 on a mid or Z point
  std::vector<double> base;    ///< base coordinate (x, theta or height) the point was sampled at

  std::size_t size() const { return points.size(); }
  void push_back(Point p, int comp, int s, double b = 0.0) {
    points.push_back(std::move(p));
    component.push_back(comp);
    side.push_back(s);
    base.push_back(b);
  }
  /// Sub-cloud of the points whose index satisfies pred(i).
  template <class Pred>
  PointCloud filter(Pred&& pred) const {
    PointCloud out;
    out.dim = dim;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (pred(i)) out.push_back(points[i], component[i], side[i], base[i]);
    return out;
  }
};

/// V-rep plus H-rep of a convex polytope. When affine_dim < dim the H-rep carries the
/// affine-hull equalities as pairs of opposite half-spaces.
struct Polytope {
  int dim = 0;
  int affine_dim = -1;  ///< -1 for the empty set
  std::vector<Point> vertices;
  std::vector<HalfSpace> facets;
  /// Boundary simplices (indices into vertices): segments of a polygon boundary.
  std::vector<std::array<int, 2>> edges;
  /// Boundary triangles of a 3-D hull, or a triangulation of a planar polygon in 3-D.
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return affine_dim < 0; }
  bool degenerate() const { return affine_dim < dim; }
  /// Membership with absolute slack `tol` on every half-space.
  bool contains(const Point& p, double tol) const;
  /// Euclidean distance from p to the polytope (0 inside).
  double distance(const Point& p) const;
};

/// Relative tolerance used for collinearity/coplanarity after per-axis normalization.
inline constexpr double kHullTolerance = 1e-10;
/// Input points closer than this (max-norm) are merged before hulling.
inline constexpr double kDedupTolerance = 1e-12;

/// Convex hull of points in R^dim, dim in {1, 2, 3}: interval, monotone chain, or
/// incremental hull. Degenerate inputs yield a lower-dimensional polytope with
/// affine_dim < dim. Throws std::invalid_argument on empty input.
Polytope convex_hull(std::span<const Point> points, int dim);
Polytope convex_hull(const PointCloud& cloud);

/// Symmetric Hausdorff distance from vertex-to-polytope distances in both directions.
double hausdorff_distance(const Polytope& a, const Polytope& b);

/// Vertex enumeration of a bounded intersection of half-spaces in R^dim.
/// Returns an empty polytope if the intersection is empty.
Polytope polytope_from_halfspaces(std::span<const HalfSpace> halfspaces, int dim);

/// Polytope intersected with additional half-spaces.
Polytope intersect(const Polytope& p, std::span<const HalfSpace> cuts);

/// leaf x [lo, hi] with the interval inserted as coordinate `axis` of R^{leaf.dim + 1}.
Polytope product_with_interval(std::span<const Point> leaf_vertices, int leaf_dim, double lo,
                               double hi, int axis);

/// Inserts `value` at coordinate `axis` of p.
Point insert_coordinate(const Point& p, int axis, double value);
/// Removes coordinate `axis` of p.
Point drop_coordinate(const Point& p, int axis);

double point_segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b);
double point_triangle_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b, const Eigen::Vector3d& c);

/// Angle in radians between two half-space normals.
double normal_angle(const HalfSpace& a, const HalfSpace& b);

}  // namespace bm

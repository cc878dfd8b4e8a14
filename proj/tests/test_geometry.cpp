#include "doctest.h"

#include "bm/errors.hpp"
#include "bm/geometry.hpp"
#include "hull_oracle.hpp"

#include <algorithm>
#include <random>

using bm::Point;
using bm::Polytope;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

bool same_vertex_sets(std::vector<Point> a, std::vector<Point> b, double tol) {
  if (a.size() != b.size()) return false;
  const auto lex = [](const Point& x, const Point& y) {
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  };
  std::sort(a.begin(), a.end(), lex);
  std::sort(b.begin(), b.end(), lex);
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] - b[i]).lpNorm<Eigen::Infinity>() > tol) return false;
  return true;
}

// Distance from p to a polygon given by its ordered corners (brute force).
double polygon_distance(const Point& p, const std::vector<Point>& corners) {
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Eigen::Vector2d a = corners[i], b = corners[(i + 1) % corners.size()];
    const Eigen::Vector2d d = b - a, r = Eigen::Vector2d(p) - a;
    if (d.x() * r.y() - d.y() * r.x() < 0) inside = false;
    const double t = std::clamp(r.dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (r - t * d).norm());
  }
  return inside ? 0.0 : best;
}

std::vector<Point> ordered_corners(const Polytope& poly) {
  std::vector<Point> out;
  for (const auto& e : poly.edges) out.push_back(poly.vertices[e[0]]);
  return out;
}

}  // namespace

TEST_CASE("square with interior points") {
  std::vector<Point> pts{pt({0, 0}), pt({1, 0}), pt({1, 1}), pt({0, 1}), pt({0.5, 0.5}),
                         pt({0.2, 0.7}), pt({0.5, 0.0})};
  const auto hull = bm::convex_hull(pts, 2);
  CHECK(hull.affine_dim == 2);
  CHECK(hull.vertices.size() == 4);
  CHECK(hull.facets.size() == 4);
  for (const auto& p : pts) CHECK(hull.contains(p, 1e-12));
  CHECK_FALSE(hull.contains(pt({1.1, 0.5}), 1e-12));
  CHECK(hull.distance(pt({2, 0.5})) == doctest::Approx(1.0));
}

TEST_CASE("collinear points give a flagged segment") {
  std::vector<Point> pts{pt({0, 0}), pt({1, 1}), pt({0.5, 0.5}), pt({2, 2})};
  const auto hull = bm::convex_hull(pts, 2);
  CHECK(hull.degenerate());
  CHECK(hull.affine_dim == 1);
  CHECK(hull.vertices.size() == 2);
  CHECK(hull.contains(pt({1.5, 1.5}), 1e-12));
  CHECK_FALSE(hull.contains(pt({1.5, 1.0}), 1e-6));
}

TEST_CASE("degenerate inputs in 3-D") {
  std::vector<Point> single{pt({1, 2, 3}), pt({1, 2, 3})};
  CHECK(bm::convex_hull(single, 3).affine_dim == 0);
  std::vector<Point> planar{pt({0, 0, 1}), pt({1, 0, 1}), pt({0, 1, 1}), pt({1, 1, 1}), pt({0.5, 0.5, 1})};
  const auto square = bm::convex_hull(planar, 3);
  CHECK(square.affine_dim == 2);
  CHECK(square.vertices.size() == 4);
  CHECK(square.distance(pt({0.5, 0.5, 3})) == doctest::Approx(2.0));
  CHECK_THROWS(bm::convex_hull(std::vector<Point>{}, 2));
  CHECK_THROWS_AS(bm::convex_hull(std::vector<Point>{pt({1, 2})}, 3), bm::DimensionError);
}

TEST_CASE("cube with coplanar face points") {
  std::vector<Point> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(pt({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)}));
  pts.push_back(pt({0.5, 0.5, 1.0}));
  pts.push_back(pt({0.5, 0.0, 0.5}));
  pts.push_back(pt({0.5, 0.5, 0.5}));
  const auto hull = bm::convex_hull(pts, 3);
  CHECK(hull.vertices.size() == 8);
  CHECK(hull.facets.size() == 6);
  CHECK(hull.distance(pt({0.5, 0.5, 2.0})) == doctest::Approx(1.0));
  CHECK(hull.distance(pt({2.0, 2.0, 0.5})) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("200 random points in 3-D match the brute-force oracle") {
  std::mt19937_64 rng(11);
  const auto pts = oracle::random_cloud(rng, 3, 200, 0);
  const auto hull = bm::convex_hull(pts, 3);
  CHECK(same_vertex_sets(hull.vertices, oracle::brute_force_vertices(pts, 3), 1e-12));
}

TEST_CASE("random clouds match the oracle, hull is idempotent and monotone") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(8, 60), dims(1, 3), flavor(0, 3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 120; ++trial) {
    const int dim = dims(rng);
    const auto pts = oracle::random_cloud(rng, dim, size(rng), flavor(rng));
    const auto hull = bm::convex_hull(pts, dim);
    if (hull.degenerate()) continue;
    CHECK(same_vertex_sets(hull.vertices, oracle::brute_force_vertices(pts, dim), 1e-12));
    const auto again = bm::convex_hull(hull.vertices, dim);
    CHECK(same_vertex_sets(again.vertices, hull.vertices, 1e-12));
    // A convex combination of hull vertices is inside and leaves the hull unchanged.
    Point inside = Point::Zero(dim);
    double total = 0.0;
    for (const auto& v : hull.vertices) {
      const double wgt = uni(rng);
      inside += wgt * v;
      total += wgt;
    }
    inside /= total;
    auto extended = pts;
    extended.push_back(inside);
    CHECK(same_vertex_sets(bm::convex_hull(extended, dim).vertices, hull.vertices, 1e-12));
    for (const auto& v : hull.vertices)
      for (const auto& h : hull.facets) CHECK(h.violation(v) <= 1e-9);
  }
}

TEST_CASE("axis permutation and translation equivariance") {
  std::mt19937_64 rng(3);
  const auto pts = oracle::random_cloud(rng, 3, 50, 0);
  const Point shift = pt({0.25, -1.5, 3.0});
  std::vector<Point> moved;
  for (const auto& p : pts) moved.push_back(pt({p[2], p[0], p[1]}) + shift);
  const auto a = bm::convex_hull(pts, 3);
  const auto b = bm::convex_hull(moved, 3);
  std::vector<Point> mapped;
  for (const auto& v : a.vertices) mapped.push_back(pt({v[2], v[0], v[1]}) + shift);
  CHECK(same_vertex_sets(mapped, b.vertices, 1e-12));
}

TEST_CASE("product consistency") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  // 1 + 1 and 1 + 2 splits: hull(A x B) = hull(A) x hull(B).
  for (int leaf_dim : {1, 2}) {
    std::vector<Point> leaf;
    for (int i = 0; i < 12; ++i) {
      Point p(leaf_dim);
      for (int k = 0; k < leaf_dim; ++k) p[k] = uni(rng);
      leaf.push_back(p);
    }
    std::vector<double> xs{-0.3, 0.1, 0.4, 0.9};
    std::vector<Point> cloud;
    for (const auto& l : leaf)
      for (double x : xs) cloud.push_back(bm::insert_coordinate(l, 0, x));
    const auto hull = bm::convex_hull(cloud, leaf_dim + 1);
    const auto leaf_hull = bm::convex_hull(leaf, leaf_dim);
    const auto product = bm::product_with_interval(leaf_hull.vertices, leaf_dim, -0.3, 0.9, 0);
    CHECK(same_vertex_sets(hull.vertices, product.vertices, 1e-12));
    CHECK(bm::hausdorff_distance(hull, product) < 1e-12);
  }
}

TEST_CASE("hausdorff distance") {
  std::vector<Point> sq{pt({0, 0}), pt({1, 0}), pt({1, 1}), pt({0, 1})};
  std::vector<Point> shifted;
  for (const auto& p : sq) shifted.push_back(p + pt({0.3, 0}));
  const auto a = bm::convex_hull(sq, 2);
  CHECK(bm::hausdorff_distance(a, a) == 0.0);
  CHECK(bm::hausdorff_distance(a, bm::convex_hull(shifted, 2)) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK_THROWS_AS(bm::hausdorff_distance(a, bm::convex_hull(std::vector<Point>{pt({0, 0, 0})}, 3)),
                  bm::DimensionError);

  // Random polygon pairs against dense boundary sampling.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pa = oracle::random_cloud(rng, 2, 12, 0);
    auto pb = oracle::random_cloud(rng, 2, 12, 0);
    for (auto& p : pb) p += pt({0.4, -0.2});
    const auto ha = bm::convex_hull(pa, 2), hb = bm::convex_hull(pb, 2);
    const auto ca = ordered_corners(ha), cb = ordered_corners(hb);
    double dense = 0.0;
    for (const auto& [from, to] : {std::pair{&ca, &cb}, std::pair{&cb, &ca}})
      for (std::size_t i = 0; i < from->size(); ++i) {
        const Point& s = (*from)[i];
        const Point& e = (*from)[(i + 1) % from->size()];
        for (int k = 0; k <= 2000; ++k) {
          const double t = k / 2000.0;
          dense = std::max(dense, polygon_distance((1 - t) * s + t * e, *to));
        }
      }
    CHECK(bm::hausdorff_distance(ha, hb) == doctest::Approx(dense).epsilon(1e-9));
  }
}

TEST_CASE("half-space intersection") {
  std::vector<bm::HalfSpace> cube;
  for (int k = 0; k < 3; ++k) {
    Point n = Point::Zero(3);
    n[k] = 1;
    cube.push_back({n, 1.0});
    cube.push_back({-n, 0.0});
  }
  const auto poly = bm::polytope_from_halfspaces(cube, 3);
  CHECK(poly.vertices.size() == 8);
  const bm::HalfSpace cut{pt({1, 1, 1}).normalized(), 1.0 / std::sqrt(3.0)};
  const auto corner = bm::intersect(poly, std::span(&cut, 1));
  CHECK(corner.vertices.size() == 4);  // tetrahedron at the origin
  const bm::HalfSpace away{pt({-1, 0, 0}), -2.0};
  CHECK(bm::intersect(poly, std::span(&away, 1)).empty());
}

TEST_CASE("coordinate helpers and normal angle") {
  const Point p = pt({1, 2});
  CHECK(bm::insert_coordinate(p, 0, 9.0) == pt({9, 1, 2}));
  CHECK(bm::insert_coordinate(p, 2, 9.0) == pt({1, 2, 9}));
  CHECK(bm::drop_coordinate(pt({9, 1, 2}), 0) == p);
  const bm::HalfSpace a{pt({1, 0}), 0}, b{pt({std::cos(1e-4), std::sin(1e-4)}), 0};
  CHECK(bm::normal_angle(a, b) == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(bm::normal_angle(a, a) == 0.0);
}

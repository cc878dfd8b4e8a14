#include "bm/geometry.hpp"

#include "bm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace bm {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

Vector3d lift(const Point& p) {
  Vector3d v = Vector3d::Zero();
  for (Eigen::Index i = 0; i < p.size(); ++i) v(i) = p(i);
  return v;
}

Point lower(const Vector3d& v, int dim) { return v.head(dim); }

HalfSpace make_halfspace(const Vector3d& n, double offset, int dim) {
  return HalfSpace{lower(n, dim), offset};
}

bool lex_less(const Point& a, const Point& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

/// Indices of representatives after merging points within kDedupTolerance (max-norm).
std::vector<int> dedup_indices(std::span<const Point> pts) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lex_less(pts[a], pts[b]); });
  std::vector<int> kept;
  for (int idx : order) {
    bool duplicate = false;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
      if (pts[idx](0) - pts[*it](0) > kDedupTolerance) break;
      if ((pts[idx] - pts[*it]).lpNorm<Eigen::Infinity>() <= kDedupTolerance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(idx);
  }
  return kept;
}

/// Per-axis affine map onto [-1, 1]^dim; hull combinatorics are invariant under it.
struct Normalizer {
  Vector3d center = Vector3d::Zero();
  Vector3d inv_scale = Vector3d::Ones();

  Normalizer(std::span<const Point> pts, const std::vector<int>& idx, int dim) {
    Vector3d lo = Vector3d::Constant(std::numeric_limits<double>::infinity());
    Vector3d hi = -lo;
    for (int i : idx) {
      const Vector3d v = lift(pts[i]);
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    for (int k = 0; k < dim; ++k) {
      center(k) = 0.5 * (lo(k) + hi(k));
      const double half = 0.5 * (hi(k) - lo(k));
      inv_scale(k) = half > 0.0 ? 1.0 / half : 1.0;
    }
    for (int k = dim; k < 3; ++k) center(k) = 0.0;
  }
  Vector3d operator()(const Point& p) const { return (lift(p) - center).cwiseProduct(inv_scale); }
};

double cross2(const Vector2d& o, const Vector2d& a, const Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

/// Strict monotone chain: counter-clockwise corner indices (into `ids`), collinear points dropped.
std::vector<int> monotone_chain(const std::vector<Vector2d>& q, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    return q[a].x() < q[b].x() || (q[a].x() == q[b].x() && q[a].y() < q[b].y());
  });
  if (ids.size() < 3) return ids;
  // a is dropped unless it lies strictly left of o->b by more than the tolerance.
  auto keep_turn = [&](int o, int a, int b) {
    const double len = (q[b] - q[o]).norm();
    return cross2(q[o], q[a], q[b]) > kHullTolerance * std::max(len, 1e-300);
  };
  std::vector<int> hull(2 * ids.size());
  std::size_t k = 0;
  for (int id : ids) {
    while (k >= 2 && !keep_turn(hull[k - 2], hull[k - 1], id)) --k;
    hull[k++] = id;
  }
  for (std::size_t i = ids.size() - 1, t = k + 1; i-- > 0;) {
    const int id = ids[i];
    while (k >= t && !keep_turn(hull[k - 2], hull[k - 1], id)) --k;
    hull[k++] = id;
  }
  hull.resize(k - 1);
  return hull;
}

// ---------------------------------------------------------------------------
// Incremental 3-D hull on normalized coordinates.

struct Face {
  std::array<int, 3> v;
  Vector3d n;
  double off;
  bool alive;
};

class IncrementalHull3 {
 public:
  explicit IncrementalHull3(const std::vector<Vector3d>& pts) : p_(pts) {}

  void build(std::array<int, 4> tetra, std::vector<int> rest) {
    const Vector3d centroid =
        0.25 * (p_[tetra[0]] + p_[tetra[1]] + p_[tetra[2]] + p_[tetra[3]]);
    const std::array<std::array<int, 3>, 4> tris = {{{tetra[0], tetra[1], tetra[2]},
                                                     {tetra[0], tetra[1], tetra[3]},
                                                     {tetra[0], tetra[2], tetra[3]},
                                                     {tetra[1], tetra[2], tetra[3]}}};
    for (auto t : tris) {
      const Vector3d n = (p_[t[1]] - p_[t[0]]).cross(p_[t[2]] - p_[t[0]]);
      if (n.dot(centroid - p_[t[0]]) > 0.0) std::swap(t[1], t[2]);
      add_face(t[0], t[1], t[2]);
    }

    // Fixed-seed Fisher-Yates (splitmix64) keeps the insertion order reproducible.
    std::uint64_t state = 0x9E3779B97F4A7C15ULL;
    auto next = [&state] {
      std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    };
    for (std::size_t i = rest.size(); i > 1; --i) std::swap(rest[i - 1], rest[next() % i]);

    for (int q : rest) insert(q);
  }

  std::vector<int> alive_faces() const {
    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
      if (faces_[f].alive) out.push_back(f);
    return out;
  }
  const Face& face(int f) const { return faces_[f]; }
  int neighbor(int a, int b) const { return edge_face_.at(key(b, a)); }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  double dist(int f, int q) const { return faces_[f].n.dot(p_[q]) - faces_[f].off; }

  void add_face(int a, int b, int c) {
    Vector3d n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
    const double len = n.norm();
    if (len > 0.0) n /= len;
    const int f = static_cast<int>(faces_.size());
    faces_.push_back(Face{{a, b, c}, n, n.dot(p_[a]), true});
    for (auto [s, t] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
      if (!edge_face_.emplace(key(s, t), f).second)
        throw std::runtime_error("convex_hull: inconsistent horizon (non-manifold edge)");
    }
    live_.push_back(f);
  }

  void kill(int f) {
    faces_[f].alive = false;
    const auto& v = faces_[f].v;
    edge_face_.erase(key(v[0], v[1]));
    edge_face_.erase(key(v[1], v[2]));
    edge_face_.erase(key(v[2], v[0]));
  }

  void insert(int q) {
    int best = -1;
    double best_dist = kHullTolerance;
    std::size_t dead = 0;
    for (int f : live_) {
      if (!faces_[f].alive) {
        ++dead;
        continue;
      }
      const double d = dist(f, q);
      if (d > best_dist) {
        best_dist = d;
        best = f;
      }
    }
    if (dead * 2 > live_.size()) {
      std::erase_if(live_, [this](int f) { return !faces_[f].alive; });
    }
    if (best < 0) return;

    std::vector<int> visible{best};
    std::vector<std::pair<int, int>> horizon;
    std::unordered_map<int, bool> is_visible{{best, true}};
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const auto v = faces_[visible[i]].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e], b = v[(e + 1) % 3];
        const int g = edge_face_.at(key(b, a));
        auto it = is_visible.find(g);
        if (it == is_visible.end()) {
          const bool vis = dist(g, q) > kHullTolerance;
          it = is_visible.emplace(g, vis).first;
          if (vis) visible.push_back(g);
        }
        if (!it->second) horizon.emplace_back(a, b);
      }
    }
    for (int f : visible) kill(f);
    for (auto [a, b] : horizon) add_face(a, b, q);
  }

  const std::vector<Vector3d>& p_;
  std::vector<Face> faces_;
  std::vector<int> live_;
  std::unordered_map<std::uint64_t, int> edge_face_;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Orthonormal pair spanning the plane with unit normal n.
std::pair<Vector3d, Vector3d> plane_basis(const Vector3d& n) {
  const Vector3d helper = std::abs(n.x()) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitY();
  const Vector3d u = n.cross(helper).normalized();
  return {u, n.cross(u)};
}

/// Assembles the output polytope from representative indices of the corner vertices.
class PolytopeBuilder {
 public:
  PolytopeBuilder(std::span<const Point> pts, int dim, int affine_dim) : pts_(pts) {
    out_.dim = dim;
    out_.affine_dim = affine_dim;
  }

  int vertex(int input_index) {
    auto [it, inserted] = remap_.emplace(input_index, static_cast<int>(order_.size()));
    if (inserted) order_.push_back(input_index);
    return it->second;
  }

  Polytope& poly() { return out_; }

  Polytope finish() {
    // Lexicographic vertex order makes the output independent of input order.
    std::vector<int> perm(order_.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return lex_less(pts_[order_[a]], pts_[order_[b]]); });
    std::vector<int> inverse(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = static_cast<int>(i);
    for (int old : perm) out_.vertices.push_back(pts_[order_[old]]);
    for (auto& e : out_.edges)
      for (int& v : e) v = inverse[v];
    for (auto& t : out_.triangles)
      for (int& v : t) v = inverse[v];
    return std::move(out_);
  }

 private:
  std::span<const Point> pts_;
  Polytope out_;
  std::unordered_map<int, int> remap_;
  std::vector<int> order_;
};

void add_equalities(Polytope& poly, const Vector3d& n, const Vector3d& through) {
  const double off = n.dot(through);
  poly.facets.push_back(make_halfspace(n, off, poly.dim));
  poly.facets.push_back(make_halfspace(-n, -off, poly.dim));
}

/// Completes {d} to an orthonormal basis of the orthogonal complement within R^dim.
std::vector<Vector3d> complement(const Vector3d& d, int dim) {
  std::vector<Vector3d> out;
  if (dim == 2) {
    out.emplace_back(-d.y(), d.x(), 0.0);
  } else if (dim == 3) {
    auto [u, v] = plane_basis(d);
    out.push_back(u);
    out.push_back(v);
  }
  return out;
}

Polytope build_point(std::span<const Point> pts, int idx, int dim) {
  PolytopeBuilder b(pts, dim, 0);
  b.vertex(idx);
  const Vector3d p = lift(pts[idx]);
  for (int k = 0; k < dim; ++k) add_equalities(b.poly(), Vector3d::Unit(k), p);
  return b.finish();
}

Polytope build_segment(std::span<const Point> pts, int ia, int ib, int dim) {
  PolytopeBuilder b(pts, dim, 1);
  const int va = b.vertex(ia), vb = b.vertex(ib);
  const Vector3d a = lift(pts[ia]), c = lift(pts[ib]);
  const Vector3d d = (c - a).normalized();
  auto& poly = b.poly();
  poly.edges.push_back({va, vb});
  poly.facets.push_back(make_halfspace(-d, -d.dot(a), dim));
  poly.facets.push_back(make_halfspace(d, d.dot(c), dim));
  for (const auto& n : complement(d, dim)) add_equalities(poly, n, a);
  return b.finish();
}

/// Polygon with counter-clockwise corners (viewed from +plane_normal in 3-D, or in the plane in 2-D).
Polytope build_polygon(std::span<const Point> pts, const std::vector<int>& corners, int dim) {
  PolytopeBuilder b(pts, dim, 2);
  auto& poly = b.poly();
  std::vector<int> local;
  for (int c : corners) local.push_back(b.vertex(c));
  const std::size_t k = corners.size();
  Vector3d plane_normal = Vector3d::UnitZ();
  if (dim == 3) {
    const Vector3d o = lift(pts[corners[0]]);
    Vector3d n = Vector3d::Zero();
    for (std::size_t i = 1; i + 1 < k; ++i)
      n += (lift(pts[corners[i]]) - o).cross(lift(pts[corners[i + 1]]) - o);
    plane_normal = n.normalized();
    add_equalities(poly, plane_normal, o);
    for (std::size_t i = 1; i + 1 < k; ++i) poly.triangles.push_back({local[0], local[i], local[i + 1]});
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Vector3d a = lift(pts[corners[i]]);
    const Vector3d c = lift(pts[corners[(i + 1) % k]]);
    const Vector3d outward = (c - a).cross(plane_normal).normalized();
    poly.edges.push_back({local[i], local[(i + 1) % k]});
    poly.facets.push_back(make_halfspace(outward, std::max(outward.dot(a), outward.dot(c)), dim));
  }
  return b.finish();
}

Polytope hull_3d(std::span<const Point> pts, const std::vector<Vector3d>& q, const std::vector<int>& ids,
                 std::array<int, 4> tetra) {
  std::vector<int> rest;
  for (int i : ids)
    if (i != tetra[0] && i != tetra[1] && i != tetra[2] && i != tetra[3]) rest.push_back(i);
  IncrementalHull3 hull(q);
  hull.build(tetra, rest);

  const auto faces = hull.alive_faces();
  std::unordered_map<int, int> slot;
  for (std::size_t i = 0; i < faces.size(); ++i) slot[faces[i]] = static_cast<int>(i);
  UnionFind groups(faces.size());
  for (int f : faces) {
    const Face& face = hull.face(f);
    for (int e = 0; e < 3; ++e) {
      const int g = hull.neighbor(face.v[e], face.v[(e + 1) % 3]);
      const Face& other = hull.face(g);
      int apex = other.v[0];
      for (int v : other.v)
        if (v != face.v[e] && v != face.v[(e + 1) % 3]) apex = v;
      const bool coplanar = std::abs(face.n.dot(q[apex]) - face.off) <= kHullTolerance &&
                            face.n.dot(other.n) > 0.0;
      if (coplanar) groups.unite(slot[f], slot[g]);
    }
  }

  std::unordered_map<int, std::vector<int>> members;
  for (std::size_t i = 0; i < faces.size(); ++i) members[groups.find(static_cast<int>(i))].push_back(faces[i]);
  std::vector<int> roots;
  for (const auto& [root, list] : members) roots.push_back(root);
  std::sort(roots.begin(), roots.end());

  std::vector<std::vector<int>> facet_corners;
  for (int root : roots) {
    const auto& list = members[root];
    Vector3d n = Vector3d::Zero();
    std::vector<int> verts;
    for (int f : list) {
      const Face& face = hull.face(f);
      n += (q[face.v[1]] - q[face.v[0]]).cross(q[face.v[2]] - q[face.v[0]]);
      verts.insert(verts.end(), face.v.begin(), face.v.end());
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    n.normalize();
    const auto [u, v] = plane_basis(n);
    std::vector<Vector2d> flat(q.size());
    for (int id : verts) flat[id] = Vector2d(u.dot(q[id]), v.dot(q[id]));
    facet_corners.push_back(monotone_chain(flat, verts));
  }

  PolytopeBuilder b(pts, 3, 3);
  auto& poly = b.poly();
  for (const auto& corners : facet_corners) {
    if (corners.size() < 3) continue;
    std::vector<int> local;
    for (int c : corners) local.push_back(b.vertex(c));
    const Vector3d o = lift(pts[corners[0]]);
    Vector3d n = Vector3d::Zero();
    for (std::size_t i = 1; i + 1 < corners.size(); ++i)
      n += (lift(pts[corners[i]]) - o).cross(lift(pts[corners[i + 1]]) - o);
    n.normalize();
    double off = -std::numeric_limits<double>::infinity();
    for (int c : corners) off = std::max(off, n.dot(lift(pts[c])));
    poly.facets.push_back(make_halfspace(n, off, 3));
    for (std::size_t i = 1; i + 1 < local.size(); ++i) poly.triangles.push_back({local[0], local[i], local[i + 1]});
  }
  return b.finish();
}

double interval_distance(double p, double lo, double hi) { return std::max({lo - p, 0.0, p - hi}); }

}  // namespace

Point insert_coordinate(const Point& p, int axis, double value) {
  Point out(p.size() + 1);
  for (Eigen::Index i = 0, j = 0; i < out.size(); ++i) out(i) = (i == axis) ? value : p(j++);
  return out;
}

Point drop_coordinate(const Point& p, int axis) {
  Point out(p.size() - 1);
  for (Eigen::Index i = 0, j = 0; i < p.size(); ++i)
    if (i != axis) out(j++) = p(i);
  return out;
}

Polytope convex_hull(std::span<const Point> points, int dim) {
  if (dim < 1 || dim > 3) throw DimensionError("convex_hull: dimension must be 1, 2 or 3");
  if (points.empty()) throw std::invalid_argument("convex_hull: empty input");
  for (const auto& p : points) {
    if (p.size() != dim) throw DimensionError("convex_hull: point dimension mismatch");
    if (!p.allFinite()) throw std::invalid_argument("convex_hull: non-finite coordinate");
  }
  const std::vector<int> ids = dedup_indices(points);
  const Normalizer norm(points, ids, dim);
  std::vector<Vector3d> q(points.size(), Vector3d::Zero());
  for (int i : ids) q[i] = norm(points[i]);

  // Affine hull: greedy farthest points.
  const int p0 = ids.front();
  auto farthest = [&](auto&& measure) {
    int best = p0;
    double best_d = -1.0;
    for (int i : ids) {
      const double d = measure(q[i]);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return std::pair{best, best_d};
  };
  const auto [p1, d1] = farthest([&](const Vector3d& x) { return (x - q[p0]).norm(); });
  if (d1 <= kHullTolerance) return build_point(points, p0, dim);

  const Vector3d e1 = (q[p1] - q[p0]).normalized();
  auto off_line = [&](const Vector3d& x) {
    const Vector3d r = x - q[p0];
    return (r - r.dot(e1) * e1).norm();
  };
  const auto [p2, d2] = farthest(off_line);
  if (d2 <= kHullTolerance) {
    auto [lo_i, lo_d] = farthest([&](const Vector3d& x) { return -(x - q[p0]).dot(e1); });
    auto [hi_i, hi_d] = farthest([&](const Vector3d& x) { return (x - q[p0]).dot(e1); });
    (void)lo_d;
    (void)hi_d;
    if (dim == 1) {
      PolytopeBuilder b(points, 1, 1);
      const int vl = b.vertex(lo_i), vh = b.vertex(hi_i);
      auto& poly = b.poly();
      poly.edges.push_back({vl, vh});
      poly.facets.push_back(HalfSpace{Point::Constant(1, -1.0), -points[lo_i](0)});
      poly.facets.push_back(HalfSpace{Point::Constant(1, 1.0), points[hi_i](0)});
      return b.finish();
    }
    return build_segment(points, lo_i, hi_i, dim);
  }

  const Vector3d r2 = q[p2] - q[p0];
  const Vector3d e2 = (r2 - r2.dot(e1) * e1).normalized();
  const Vector3d plane_n = e1.cross(e2);
  const auto [p3, d3] = farthest([&](const Vector3d& x) { return std::abs((x - q[p0]).dot(plane_n)); });
  if (dim == 2 || d3 <= kHullTolerance) {
    std::vector<Vector2d> flat(q.size());
    for (int i : ids) flat[i] = Vector2d((q[i] - q[p0]).dot(e1), (q[i] - q[p0]).dot(e2));
    auto corners = monotone_chain(flat, ids);
    // Corners are counter-clockwise about e1 x e2; in 2-D that must be +z.
    if (dim == 2 && plane_n.z() < 0.0) std::reverse(corners.begin(), corners.end());
    if (corners.size() == 2) return build_segment(points, corners[0], corners[1], dim);
    return build_polygon(points, corners, dim);
  }
  return hull_3d(points, q, ids, {p0, p1, p2, p3});
}

Polytope convex_hull(const PointCloud& cloud) { return convex_hull(cloud.points, cloud.dim); }

bool Polytope::contains(const Point& p, double tol) const {
  if (empty()) return false;
  return std::all_of(facets.begin(), facets.end(),
                     [&](const HalfSpace& h) { return h.violation(p) <= tol; });
}

double Polytope::distance(const Point& p) const {
  if (p.size() != dim) throw DimensionError("Polytope::distance: dimension mismatch");
  if (empty()) return std::numeric_limits<double>::infinity();
  if (affine_dim == 0) return (p - vertices.front()).norm();
  if (dim == 1) return interval_distance(p(0), vertices.front()(0), vertices.back()(0));
  const Vector3d x = lift(p);
  if (affine_dim == 1) return point_segment_distance(x, lift(vertices[0]), lift(vertices[1]));
  const bool full = affine_dim == dim;
  if (full && contains(p, 0.0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  if (dim == 2) {
    for (const auto& e : edges)
      best = std::min(best, point_segment_distance(x, lift(vertices[e[0]]), lift(vertices[e[1]])));
  } else {
    for (const auto& t : triangles)
      best = std::min(best, point_triangle_distance(x, lift(vertices[t[0]]), lift(vertices[t[1]]),
                                                    lift(vertices[t[2]])));
  }
  return best;
}

double hausdorff_distance(const Polytope& a, const Polytope& b) {
  if (a.dim != b.dim)
    throw DimensionError("hausdorff_distance: dimensions " + std::to_string(a.dim) + " and " +
                         std::to_string(b.dim) + " differ");
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (const auto& v : a.vertices) d = std::max(d, b.distance(v));
  for (const auto& v : b.vertices) d = std::max(d, a.distance(v));
  return d;
}

Polytope polytope_from_halfspaces(std::span<const HalfSpace> halfspaces, int dim) {
  if (dim < 1 || dim > 3) throw DimensionError("polytope_from_halfspaces: dimension must be 1, 2 or 3");
  for (const auto& h : halfspaces)
    if (h.normal.size() != dim) throw DimensionError("polytope_from_halfspaces: normal dimension mismatch");
  const int n = static_cast<int>(halfspaces.size());
  std::vector<Point> candidates;
  std::vector<int> pick(dim);
  auto feasible = [&](const Point& x) {
    const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
    return std::all_of(halfspaces.begin(), halfspaces.end(), [&](const HalfSpace& h) {
      return h.violation(x) <= 1e-9 * std::max(scale, std::abs(h.offset));
    });
  };
  // Enumerate all dim-subsets in lexicographic order.
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == dim) {
      Eigen::MatrixXd a(dim, dim);
      Eigen::VectorXd rhs(dim);
      for (int r = 0; r < dim; ++r) {
        a.row(r) = halfspaces[pick[r]].normal.transpose();
        rhs(r) = halfspaces[pick[r]].offset;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible()) return;
      const Point x = lu.solve(rhs);
      if (x.allFinite() && feasible(x)) candidates.push_back(x);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      choose(i + 1, depth + 1);
    }
  };
  choose(0, 0);
  if (candidates.empty()) {
    Polytope empty;
    empty.dim = dim;
    return empty;
  }
  return convex_hull(candidates, dim);
}

Polytope intersect(const Polytope& p, std::span<const HalfSpace> cuts) {
  std::vector<HalfSpace> all(p.facets.begin(), p.facets.end());
  all.insert(all.end(), cuts.begin(), cuts.end());
  return polytope_from_halfspaces(all, p.dim);
}

Polytope product_with_interval(std::span<const Point> leaf_vertices, int leaf_dim, double lo,
                               double hi, int axis) {
  if (axis < 0 || axis > leaf_dim) throw DimensionError("product_with_interval: axis out of range");
  std::vector<Point> pts;
  for (const auto& v : leaf_vertices) {
    if (v.size() != leaf_dim) throw DimensionError("product_with_interval: leaf vertex dimension mismatch");
    pts.push_back(insert_coordinate(v, axis, lo));
    pts.push_back(insert_coordinate(v, axis, hi));
  }
  return convex_hull(pts, leaf_dim + 1);
}

double point_segment_distance(const Vector3d& p, const Vector3d& a, const Vector3d& b) {
  const Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double point_triangle_distance(const Vector3d& p, const Vector3d& a, const Vector3d& b,
                               const Vector3d& c) {
  // Closest point by Voronoi-region classification of p against the triangle.
  const Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();
  const Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  const double denom = va + vb + vc;
  if (denom == 0.0)  // degenerate triangle
    return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                     point_segment_distance(p, a, c)});
  const double v = vb / denom, w = vc / denom;
  return (p - (a + v * ab + w * ac)).norm();
}

double normal_angle(const HalfSpace& a, const HalfSpace& b) {
  const Vector3d u = lift(a.normal).normalized();
  const Vector3d v = lift(b.normal).normalized();
  // atan2(|u x v|, u.v) stays accurate for tiny angles where acos does not.
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace bm

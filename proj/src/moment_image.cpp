#include "bm/moment_image.hpp"

#include "bm/errors.hpp"
#include "bm/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAngleTolerance = 1e-3;

double half_width(const ScenarioModel& model) {
  if (const auto* collar = std::get_if<CollarGeometry>(&model.geometry)) return collar->delta;
  return 1.0;  // |f| <= 1 on the circle and sphere models
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
  return out;
}

std::optional<Witness> farthest(const Polytope& hull, const Polytope& target) {
  std::optional<Witness> best;
  for (const auto& v : hull.vertices) {
    const double d = target.distance(v);
    if (!best || d > best->distance) best = Witness{v, d, "cloud"};
  }
  for (const auto& v : target.vertices) {
    const double d = hull.distance(v);
    if (!best || d > best->distance) best = Witness{v, d, "target"};
  }
  return best;
}

Polytope leaf_image(const std::vector<Point>& leaf_points, int leaf_dim) {
  if (leaf_dim == 0) {
    Polytope p;
    p.dim = 0;
    p.affine_dim = 0;
    p.vertices = {Point(0)};
    return p;
  }
  return convex_hull(leaf_points, leaf_dim);
}

bool halfspaces_match(const HalfSpace& a, const HalfSpace& b, double tol) {
  return normal_angle(a, b) <= kAngleTolerance && std::abs(a.offset - b.offset) <= tol;
}

// Uniform bucket grid over points given in raster-frame coordinates.
class BucketGrid {
 public:
  BucketGrid(const std::vector<std::array<double, 3>>& pts, int k, double cell) : pts_(pts), k_(k) {
    lo_.fill(0.0);
    count_.fill(1);
    for (int a = 0; a < k; ++a) {
      double lo = kInf, hi = -kInf;
      for (const auto& p : pts) {
        lo = std::min(lo, p[a]);
        hi = std::max(hi, p[a]);
      }
      lo_[a] = lo;
      extent_ = std::max(extent_, hi - lo);
    }
    // Keep the number of cells bounded; a coarser grid only slows the search.
    cell_ = std::max(cell, extent_ / 400.0);
    if (!(cell_ > 0.0)) cell_ = 1.0;
    std::size_t total = 1;
    for (int a = 0; a < k; ++a) {
      double hi = -kInf;
      for (const auto& p : pts) hi = std::max(hi, p[a]);
      count_[a] = static_cast<int>(std::floor((hi - lo_[a]) / cell_)) + 1;
      total *= static_cast<std::size_t>(count_[a]);
    }
    start_.assign(total + 1, 0);
    std::vector<std::size_t> key(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      key[i] = flat(cell_of(pts[i]));
      ++start_[key[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    items_.resize(pts.size());
    auto fill = start_;
    for (std::size_t i = 0; i < pts.size(); ++i) items_[fill[key[i]]++] = static_cast<int>(i);
  }

  /// Exact distance from q to the nearest point, by expanding Chebyshev rings of cells.
  double nearest(const std::array<double, 3>& q) const {
    const auto c0 = cell_of(q);
    const int max_ring = *std::max_element(count_.begin(), count_.end()) + 1;
    double best = kInf;
    for (int r = 0; r <= max_ring; ++r) {
      visit_ring(c0, r, [&](std::size_t cell) {
        for (std::size_t s = start_[cell]; s < start_[cell + 1]; ++s) {
          const auto& p = pts_[items_[s]];
          double d2 = 0.0;
          for (int a = 0; a < k_; ++a) d2 += (p[a] - q[a]) * (p[a] - q[a]);
          best = std::min(best, d2);
        }
      });
      if (best < kInf && std::sqrt(best) <= r * cell_) break;
    }
    return std::sqrt(best);
  }

 private:
  std::array<int, 3> cell_of(const std::array<double, 3>& p) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < k_; ++a)
      c[a] = static_cast<int>(std::floor((p[a] - lo_[a]) / cell_));
    return c;
  }
  std::size_t flat(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (int a = k_ - 1; a >= 0; --a) idx = idx * count_[a] + static_cast<std::size_t>(c[a]);
    return idx;
  }
  template <class Fn>
  void visit_ring(const std::array<int, 3>& c0, int r, Fn&& fn) const {
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < k_; ++a) {
      lo[a] = -r;
      hi[a] = r;
    }
    for (int i = lo[0]; i <= hi[0]; ++i)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int l = lo[2]; l <= hi[2]; ++l) {
          if (std::max({std::abs(i), std::abs(j), std::abs(l)}) != r) continue;
          const std::array<int, 3> c{c0[0] + i, c0[1] + j, c0[2] + l};
          bool inside = true;
          for (int a = 0; a < k_; ++a) inside = inside && c[a] >= 0 && c[a] < count_[a];
          if (inside) fn(flat(c));
        }
  }

  const std::vector<std::array<double, 3>>& pts_;
  int k_;
  double cell_ = 1.0;
  double extent_ = 0.0;
  std::array<double, 3> lo_;
  std::array<int, 3> count_;
  std::vector<std::size_t> start_;
  std::vector<int> items_;
};

}  // namespace

PointCloud sample_image(const ScenarioModel& model, double eps, Resolution resolution, int threads) {
  if (resolution.n_collar < 8 || resolution.n_leaf < 1)
    throw ResolutionError("sample_image: resolution must be at least (8, 1), got (" +
                          std::to_string(resolution.n_collar) + ", " +
                          std::to_string(resolution.n_leaf) + ")");
  if (!(eps > 0.0) || !(eps < half_width(model)))
    throw std::invalid_argument("sample_image: eps must lie in (0, half-width)");

  const DesingMoment moment(model, eps);
  const auto leaf = model.leaf.sample(resolution.n_leaf);
  const auto segments = component_segments(model);
  const int xi = model.torus.xi_index;

  struct Slice {
    int component;
    int side;
    double base;
    double xi;
  };
  std::vector<Slice> slices;
  if (const auto* collar = std::get_if<CollarGeometry>(&model.geometry)) {
    const auto xs = linspace(-collar->delta, collar->delta, resolution.n_collar);
    std::vector<double> values(xs.size());
    parallel_for(xs.size(), threads,
                 [&](std::size_t i) { values[i] = moment.value(segments[xs[i] < 0 ? 0 : 1], xs[i]); });
    for (std::size_t i = 0; i < xs.size(); ++i)
      slices.push_back({xs[i] < 0 ? 0 : 1, xs[i] < 0 ? -1 : (xs[i] > 0 ? 1 : 0), xs[i], values[i]});
  } else {
    for (const auto& seg : segments) {
      const auto bases = linspace(seg.lo, seg.hi, resolution.n_collar);
      const auto values = moment.values(seg, bases, threads);
      const double mid = 0.5 * (seg.lo + seg.hi);
      for (std::size_t i = 0; i < bases.size(); ++i)
        slices.push_back({seg.index, bases[i] < mid ? -1 : (bases[i] > mid ? 1 : 0), bases[i], values[i]});
    }
  }

  PointCloud cloud;
  cloud.dim = model.torus.dim;
  for (const auto& s : slices)
    for (const auto& l : leaf) {
      Point p = insert_coordinate(l, xi, s.xi);
      const bool keep = std::all_of(model.cuts.begin(), model.cuts.end(), [&](const ImageCut& c) {
        return !c.applies_to(s.component) || c.half.violation(p) <= 0.0;
      });
      if (keep) cloud.push_back(std::move(p), s.component, s.side, s.base);
    }
  return cloud;
}

GridPitch grid_pitch(const PointCloud& cloud, int xi_index) {
  GridPitch out;
  if (cloud.size() == 0) return out;
  std::vector<std::pair<int, double>> xis;
  std::vector<Point> leaves;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    xis.emplace_back(cloud.component[i], cloud.points[i][xi_index]);
    leaves.push_back(drop_coordinate(cloud.points[i], xi_index));
  }
  std::sort(xis.begin(), xis.end());
  for (std::size_t i = 1; i < xis.size(); ++i)
    if (xis[i].first == xis[i - 1].first) out.xi_gap = std::max(out.xi_gap, xis[i].second - xis[i - 1].second);

  const auto lex = [](const Point& a, const Point& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::sort(leaves.begin(), leaves.end(), lex);
  leaves.erase(std::unique(leaves.begin(), leaves.end(), [](const Point& a, const Point& b) { return a == b; }),
               leaves.end());
  if (leaves.size() > 1) {
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      double best = kInf;
      for (std::size_t j = 0; j < leaves.size(); ++j)
        if (j != i) best = std::min(best, (leaves[i] - leaves[j]).norm());
      out.leaf_gap = std::max(out.leaf_gap, best);
    }
  }
  return out;
}

LocalProductReport check_local_product(const PointCloud& cloud, const LeafPolytope& leaf, int xi_index,
                                       int m, double a_eps, double tol) {
  LocalProductReport r;
  r.odd = m % 2 == 1;
  r.tol = tol;
  r.a_eps = a_eps;
  if (cloud.size() == 0) return r;
  const auto hull = convex_hull(cloud);
  r.hull_vertices = hull.vertices.size();
  const auto& delta = leaf.extreme_points();
  const auto product = [&](double lo, double hi) {
    return product_with_interval(delta, leaf.dim(), lo, hi, xi_index);
  };

  if (!r.odd) {
    r.interval_lo = -a_eps;
    r.interval_hi = a_eps;
    const auto target = product(-a_eps, a_eps);
    r.hausdorff = hausdorff_distance(hull, target);
    r.witness = farthest(hull, target);
    r.pass = r.hausdorff <= tol;
    return r;
  }

  std::vector<double> lower, upper;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double v = cloud.points[i][xi_index];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (cloud.side[i] < 0) lower.push_back(v);
    if (cloud.side[i] > 0) upper.push_back(v);
  }
  std::sort(lower.begin(), lower.end());
  std::sort(upper.begin(), upper.end());
  if (lower.size() != upper.size() || lower.empty()) {
    r.fold_defect = kInf;
  } else {
    for (std::size_t i = 0; i < lower.size(); ++i)
      r.fold_defect = std::max(r.fold_defect, std::abs(lower[i] - upper[i]));
  }
  r.fold_pass = r.fold_defect <= tol;

  const bool positive = hi >= -lo;
  r.interval_lo = positive ? 0.0 : -a_eps;
  r.interval_hi = positive ? a_eps : 0.0;
  const auto target = product(r.interval_lo, r.interval_hi);
  r.hausdorff = hausdorff_distance(hull, target);
  r.witness = farthest(hull, target);
  r.naive_hausdorff = hausdorff_distance(hull, product(-a_eps, a_eps));
  r.naive_pass = r.naive_hausdorff <= tol;
  r.pass = r.fold_pass && r.hausdorff <= tol;
  return r;
}

ConvexityReport convexity_check(const PointCloud& cloud, double tol, int threads) {
  ConvexityReport r;
  r.tol = tol;
  r.pitch_used = tol;
  if (cloud.size() == 0 || !(tol > 0.0)) return r;
  const auto hull = convex_hull(cloud);
  const int k = hull.affine_dim;
  if (k == 0) {
    r.pass = true;
    r.raster_points = 1;
    return r;
  }

  // Orthonormal frame of the affine hull.
  const Point origin = hull.vertices.front();
  Eigen::MatrixXd span(cloud.dim, hull.vertices.size());
  for (std::size_t i = 0; i < hull.vertices.size(); ++i) span.col(i) = hull.vertices[i] - origin;
  Eigen::MatrixXd frame;
  if (k == cloud.dim) {
    frame = Eigen::MatrixXd::Identity(cloud.dim, k);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
    frame = qr.householderQ() * Eigen::MatrixXd::Identity(cloud.dim, k);
  }
  const auto to_frame = [&](const Point& p) {
    const Eigen::VectorXd y = frame.transpose() * (p - origin);
    std::array<double, 3> out{0, 0, 0};
    for (int a = 0; a < k; ++a) out[a] = y[a];
    return out;
  };

  std::vector<std::array<double, 3>> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud.points) pts.push_back(to_frame(p));
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < k; ++a) {
    lo[a] = kInf;
    hi[a] = -kInf;
    for (const auto& v : hull.vertices) {
      const auto y = to_frame(v);
      lo[a] = std::min(lo[a], y[a]);
      hi[a] = std::max(hi[a], y[a]);
    }
  }

  double pitch = tol;
  std::array<std::size_t, 3> n{1, 1, 1};
  for (;;) {
    double total = 1.0;
    for (int a = 0; a < k; ++a) {
      n[a] = static_cast<std::size_t>(std::floor((hi[a] - lo[a]) / pitch)) + 1;
      total *= static_cast<double>(n[a]);
    }
    if (total <= static_cast<double>(kMaxRasterPoints)) break;
    pitch *= std::pow(total / static_cast<double>(kMaxRasterPoints), 1.0 / k) * 1.001;
  }
  r.pitch_used = pitch;

  const BucketGrid grid(pts, k, 2.0 * tol);
  double scale = 1.0;
  for (const auto& v : hull.vertices) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  const double slack = 1e-9 * scale;

  // One slab per index along the first raster axis; reduced in slab order.
  struct SlabResult {
    std::size_t count = 0;
    double gap = 0.0;
    std::optional<Point> witness;
  };
  std::vector<SlabResult> slabs(n[0]);
  parallel_for(n[0], threads, [&](std::size_t i) {
    SlabResult& out = slabs[i];
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t l = 0; l < n[2]; ++l) {
        const std::array<double, 3> y{lo[0] + pitch * i, k > 1 ? lo[1] + pitch * j : 0.0,
                                      k > 2 ? lo[2] + pitch * l : 0.0};
        Eigen::VectorXd yk(k);
        for (int a = 0; a < k; ++a) yk[a] = y[a];
        const Point x = origin + frame * yk;
        if (!hull.contains(x, slack)) continue;
        ++out.count;
        const double d = grid.nearest(y);
        if (d > out.gap) {
          out.gap = d;
          out.witness = x;
        }
      }
  });
  for (const auto& s : slabs) {
    r.raster_points += s.count;
    if (s.gap > r.max_gap) {
      r.max_gap = s.gap;
      r.witness = s.witness;
    }
  }
  r.pass = r.max_gap <= 2.0 * tol;
  if (r.pass) r.witness.reset();
  return r;
}

std::string to_string(GlobalCase c) {
  switch (c) {
    case GlobalCase::product:
      return "case_1";
    case GlobalCase::cut:
      return "case_2";
    default:
      return "unclassified";
  }
}

double GlobalReport::max_defect() const {
  double d = 0.0;
  for (const auto& c : components) d = std::max(d, c.max_defect);
  return d;
}

GlobalReport classify_components(const ScenarioModel& model, const PointCloud& cloud,
                                 const std::vector<double>& component_a, double tol, int threads) {
  GlobalReport report;
  report.tol = tol;
  const int xi = model.torus.xi_index;
  const int leaf_dim = model.torus.dim - 1;
  report.pass = true;

  for (const auto& seg : component_segments(model)) {
    ComponentReport c;
    c.component = seg.index;
    c.boundary_count = seg.boundary_zero_count();
    c.a_eps = component_a.at(seg.index);
    const auto sub = cloud.filter([&](std::size_t i) { return cloud.component[i] == seg.index; });
    if (sub.size() == 0) {
      c.pass = false;
      report.pass = false;
      report.components.push_back(std::move(c));
      continue;
    }
    c.hull = convex_hull(sub);

    // Delta_i from the leaf coordinates of the window next to each Z end.
    const double reach = kWindowFraction * (seg.hi - seg.lo);
    std::vector<Polytope> ends;
    for (const auto& [zero, a, b] : {std::tuple{seg.zero_lo, seg.lo, seg.lo + reach},
                                     std::tuple{seg.zero_hi, seg.hi - reach, seg.hi}}) {
      if (zero < 0) continue;
      std::vector<Point> leaves;
      for (std::size_t i = 0; i < sub.size(); ++i)
        if (sub.base[i] >= a && sub.base[i] <= b) leaves.push_back(drop_coordinate(sub.points[i], xi));
      if (!leaves.empty()) ends.push_back(leaf_image(leaves, leaf_dim));
    }
    if (ends.empty()) ends.push_back(leaf_image({model.leaf.extreme_points()}, leaf_dim));
    if (ends.size() == 2)
      c.delta_coincidence = leaf_dim == 0 ? 0.0 : hausdorff_distance(ends[0], ends[1]);

    const auto product = product_with_interval(ends[0].vertices, leaf_dim, -c.a_eps, c.a_eps, xi);
    c.product_defect = hausdorff_distance(c.hull, product);

    std::vector<HalfSpace> constraints;
    bool any_active = false;
    for (std::size_t k = 0; k < model.cuts.size(); ++k) {
      const auto& cut = model.cuts[k];
      if (!cut.applies_to(seg.index)) continue;
      CutRecovery rec;
      rec.cut_index = static_cast<int>(k);
      for (const auto& v : product.vertices) rec.active = rec.active || cut.half.violation(v) > tol;
      rec.angle = kInf;
      for (const auto& f : c.hull.facets) {
        const double ang = normal_angle(cut.half, f);
        if (ang < rec.angle) {
          rec.angle = ang;
          rec.offset_error = std::abs(f.offset - cut.half.offset);
        }
      }
      rec.recovered = rec.angle <= kAngleTolerance && rec.offset_error <= tol;
      any_active = any_active || rec.active;
      constraints.push_back(cut.half);
      c.cuts.push_back(rec);
    }
    if (!c.hull.degenerate()) {
      for (const auto& f : c.hull.facets) {
        const bool on_product = std::any_of(product.facets.begin(), product.facets.end(),
                                            [&](const HalfSpace& p) { return halfspaces_match(f, p, tol); });
        if (!on_product) c.recovered.push_back(f);
      }
    }
    constraints.insert(constraints.end(), c.recovered.begin(), c.recovered.end());
    const auto form = intersect(product, constraints);
    c.form_defect = hausdorff_distance(c.hull, form);
    for (const auto& p : sub.points) c.contained = c.contained && form.contains(p, tol);

    c.expected = (c.boundary_count == 2 && !any_active) ? GlobalCase::product : GlobalCase::cut;
    if (c.product_defect <= tol)
      c.observed = GlobalCase::product;
    else if (c.form_defect <= tol)
      c.observed = GlobalCase::cut;
    c.max_defect = c.observed == GlobalCase::product ? c.product_defect : c.form_defect;

    c.convexity = convexity_check(sub, tol, threads);
    const bool cuts_ok = std::all_of(c.cuts.begin(), c.cuts.end(),
                                     [](const CutRecovery& r) { return !r.active || r.recovered; });
    const bool deltas_ok = !c.delta_coincidence || *c.delta_coincidence <= tol;
    c.pass = c.observed == c.expected && c.contained && cuts_ok && deltas_ok && c.convexity.pass;
    report.pass = report.pass && c.pass;
    report.components.push_back(std::move(c));
  }
  return report;
}

std::vector<double> component_a_eps(const ScenarioModel& model, double eps) {
  const DesingMoment moment(model, eps);
  std::vector<double> out;
  for (const auto& seg : component_segments(model)) out.push_back(moment.component_max(seg));
  return out;
}

GlobalReport check_global_structure(const ScenarioModel& model, double eps, double tol,
                                    Resolution resolution, int threads) {
  const auto cloud = sample_image(model, eps, resolution, threads);
  return classify_components(model, cloud, component_a_eps(model, eps), tol, threads);
}

}  // namespace bm

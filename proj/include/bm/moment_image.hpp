#pragma once

// Sampled moment images and the checks of the local product and global
// classification statements.

#include "bm/desingularize.hpp"
#include "bm/geometry.hpp"
#include "bm/hamiltonian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bm {

struct Resolution {
  int n_collar = 201;
  int n_leaf = 41;
};

/// Desingularized moment image on a deterministic grid: n_collar base points per
/// collar (or per circle/sphere component, endpoints included) times the leaf grid,
/// filtered by the model's cuts. Throws ResolutionError below (8, 1).
PointCloud sample_image(const ScenarioModel& model, double eps, Resolution resolution,
                        int threads = 1);

/// Image-space grid pitch: hypot of the largest gap between consecutive distinct
/// xi-values within a component and the largest nearest-neighbour distance of the
/// distinct leaf coordinates.
struct GridPitch {
  double xi_gap = 0.0;
  double leaf_gap = 0.0;
  double pitch() const { return std::hypot(xi_gap, leaf_gap); }
};
GridPitch grid_pitch(const PointCloud& cloud, int xi_index);

/// Default check tolerance: twice the grid pitch.
inline double default_tolerance(const GridPitch& pitch) { return 2.0 * pitch.pitch(); }

struct Witness {
  Point point;
  double distance = 0.0;
  std::string source;  ///< "cloud" (hull vertex far from the target) or "target"
};

struct LocalProductReport {
  bool pass = false;
  bool odd = false;
  double tol = 0.0;
  double a_eps = 0.0;
  double interval_lo = 0.0, interval_hi = 0.0;  ///< xi-interval of the target product
  double hausdorff = 0.0;                       ///< hull vs target product
  std::optional<Witness> witness;
  // Odd m only.
  double fold_defect = 0.0;   ///< max pairing gap of the sorted side xi-multisets
  bool fold_pass = true;
  double naive_hausdorff = 0.0;  ///< hull vs the two-sided product
  bool naive_pass = true;
  std::size_t hull_vertices = 0;
};

/// Product check near one Z component. Even m: hull(cloud) ~ Delta x [-a, a].
/// Odd m: the side -1 and side +1 xi-multisets coincide and hull(cloud) ~ Delta x [0, a]
/// (or [-a, 0], orientation read from the data); the two-sided product is reported as
/// the naive check, which is expected to fail.
LocalProductReport check_local_product(const PointCloud& cloud, const LeafPolytope& leaf,
                                       int xi_index, int m, double a_eps, double tol);

struct ConvexityReport {
  bool pass = false;
  double tol = 0.0;
  double pitch_used = 0.0;  ///< raster pitch (tol unless coarsened to cap the raster size)
  std::size_t raster_points = 0;
  double max_gap = 0.0;  ///< largest distance from a raster point to the cloud
  std::optional<Point> witness;
};

/// Rasterizes hull(cloud) and checks that every raster point lies within 2 tol of the
/// cloud. The raster is coarsened when it would exceed kMaxRasterPoints.
inline constexpr std::size_t kMaxRasterPoints = 4'000'000;
ConvexityReport convexity_check(const PointCloud& cloud, double tol, int threads = 1);

enum class GlobalCase { product, cut, unclassified };
std::string to_string(GlobalCase c);

struct CutRecovery {
  int cut_index = 0;
  bool active = false;  ///< the cut removes part of the product
  bool recovered = false;
  double angle = 0.0;         ///< to the best matching hull facet
  double offset_error = 0.0;  ///< offset difference to that facet
};

struct ComponentReport {
  int component = 0;
  int boundary_count = 0;
  GlobalCase expected = GlobalCase::product;
  GlobalCase observed = GlobalCase::unclassified;
  bool pass = false;
  double a_eps = 0.0;
  double product_defect = 0.0;  ///< Hausdorff(hull, Delta x [-a, a])
  double form_defect = 0.0;     ///< Hausdorff(hull, product cut by planted and recovered half-spaces)
  double max_defect = 0.0;      ///< defect of the observed classification
  std::optional<double> delta_coincidence;  ///< Hausdorff(Delta_lo, Delta_hi) for two Z ends
  bool contained = true;
  std::vector<HalfSpace> recovered;
  std::vector<CutRecovery> cuts;
  ConvexityReport convexity;
  Polytope hull;
};

struct GlobalReport {
  bool pass = false;
  double tol = 0.0;
  std::vector<ComponentReport> components;
  double max_defect() const;
};

/// Fraction of each component, next to each Z end, whose leaf image defines Delta_i.
inline constexpr double kWindowFraction = 0.25;

/// Classification of an already sampled image. `component_a` holds a_eps per component.
GlobalReport classify_components(const ScenarioModel& model, const PointCloud& cloud,
                                 const std::vector<double>& component_a, double tol,
                                 int threads = 1);

/// Samples the model at eps and classifies every component: case (1) product when the
/// component has two Z ends and no cut applies, case (2) otherwise.
GlobalReport check_global_structure(const ScenarioModel& model, double eps, double tol,
                                    Resolution resolution, int threads = 1);

/// a_eps of every component, in component order.
std::vector<double> component_a_eps(const ScenarioModel& model, double eps);

}  // namespace bm

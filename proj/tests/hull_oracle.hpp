#pragma once

// Brute-force hull vertices: a point is a vertex iff the supporting hyperplanes
// through it (each spanned by dim input points) have normals spanning R^dim.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<Eigen::VectorXd> brute_force_vertices(const std::vector<Eigen::VectorXd>& pts,
                                                         int dim, double tol = 1e-9) {
  const int n = static_cast<int>(pts.size());
  std::vector<std::vector<Eigen::Vector3d>> normals(n);
  auto lift = [](const Eigen::VectorXd& p) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int k = 0; k < p.size(); ++k) v[k] = p[k];
    return v;
  };
  std::vector<Eigen::Vector3d> q(n);
  for (int i = 0; i < n; ++i) q[i] = lift(pts[i]);

  auto try_plane = [&](Eigen::Vector3d normal, const Eigen::Vector3d& through) {
    const double len = normal.norm();
    if (len < 1e-12) return;
    normal /= len;
    const double off = normal.dot(through);
    bool below = true, above = true;
    for (int k = 0; k < n; ++k) {
      const double s = normal.dot(q[k]) - off;
      below = below && s <= tol;
      above = above && s >= -tol;
    }
    if (!below && !above) return;
    if (!below) normal = -normal;
    for (int k = 0; k < n; ++k)
      if (std::abs(normal.dot(q[k]) - normal.dot(through)) <= tol) normals[k].push_back(normal);
  };

  if (dim == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    std::vector<Eigen::VectorXd> out{Eigen::VectorXd::Constant(1, lo)};
    if (hi > lo) out.push_back(Eigen::VectorXd::Constant(1, hi));
    return out;
  }
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Eigen::Vector3d d = q[j] - q[i];
        try_plane(Eigen::Vector3d(-d.y(), d.x(), 0.0), q[i]);
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) try_plane((q[j] - q[i]).cross(q[k] - q[i]), q[i]);
  }

  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < n; ++i) {
    if (normals[i].empty()) continue;
    Eigen::MatrixXd m(dim, normals[i].size());
    for (std::size_t c = 0; c < normals[i].size(); ++c) m.col(c) = normals[i][c].head(dim);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-9);
    if (lu.rank() == dim) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) { return (a - b).norm() == 0.0; }),
            out.end());
  return out;
}

/// Random clouds of several flavors: uniform box, on a sphere, cube corners with
/// face/interior points, and integer lattices (many coplanar/collinear triples).
inline std::vector<Eigen::VectorXd> random_cloud(std::mt19937_64& rng, int dim, int n, int flavor) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_int_distribution<int> lattice(-2, 2);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p(dim);
    for (int k = 0; k < dim; ++k) p[k] = uni(rng);
    if (flavor == 1) {
      p.normalize();
    } else if (flavor == 2 && i < (1 << dim)) {
      for (int k = 0; k < dim; ++k) p[k] = (i >> k) & 1 ? 1.0 : -1.0;
    } else if (flavor == 2 && i % 3 == 0) {
      p[i % dim] = 1.0;  // on a cube face
    } else if (flavor == 3) {
      for (int k = 0; k < dim; ++k) p[k] = lattice(rng);
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace oracle

#pragma once

// Local normal form of a b^m-symplectic structure on a collar (-delta, delta) x Z,
// with the defining function normalized to the collar coordinate f(x, z) = x.

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace bm {

/// Laurent data of a collar form
///   omega = sum_j dx/x^j ^ alpha_j + beta.
/// alpha[j-1] is the leaf-constant covector representing alpha_j on the Z frame;
/// beta is the antisymmetric Z-frame pairing (empty means zero).
struct LaurentData {
  std::vector<Eigen::VectorXd> alpha;
  Eigen::MatrixXd beta;
};

class CollarModel {
 public:
  CollarModel(int m, double delta, int leaf_dim, LaurentData laurent);

  int order() const { return m_; }
  double half_width() const { return delta_; }
  int leaf_dim() const { return leaf_dim_; }
  /// Dimension of the Z frame (length of every alpha covector).
  int frame_dim() const { return static_cast<int>(laurent_.alpha.front().size()); }
  const LaurentData& laurent() const { return laurent_; }

 private:
  int m_;
  double delta_;
  int leaf_dim_;
  LaurentData laurent_;
};

/// Form density of the singular terms: sum_j w_j x^{-j}.
double singular_density(std::span<const double> w, double x);

/// Singular part of the moment map at f = x:
///   w_1 log|x| + sum_{i>=2} w_i x^{-(i-1)} / (i-1).
double singular_primitive(std::span<const double> w, double x);

/// Exact derivative of singular_primitive: w_1/x - sum_{i>=2} w_i x^{-i}.
double singular_primitive_derivative(std::span<const double> w, double x);

/// Coefficients c_j of the density whose antiderivative is singular_primitive:
/// c_1 = w_1 and c_j = -w_j for j >= 2.
std::vector<double> moment_density_coefficients(std::span<const double> w);

/// omega(u, v) at collar coordinate x. Tangent vectors are (d/dx, Z-frame) coordinates,
/// i.e. of length 1 + frame_dim().
double eval_bm_form(const CollarModel& collar, double x, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v);

struct LaurentFit {
  std::vector<double> w;       ///< singular weights in the moment-map convention
  std::vector<double> smooth;  ///< polynomial coefficients, constant term first
  double residual = 0.0;       ///< Euclidean norm of the sample residual
};

/// Least-squares fit of samples (x, value) in the basis
/// {log|x|, x^-1, ..., x^-(m-1), 1, x, ..., x^smooth_degree}.
/// Throws RankDeficientError when the design matrix is numerically singular.
LaurentFit fit_laurent_coefficients(std::span<const std::pair<double, double>> samples, int m,
                                    int smooth_degree = 3);

}  // namespace bm

#include "bm/collar_model.hpp"

#include "bm/errors.hpp"

#include <cmath>
#include <string>

namespace bm {
namespace {

void require_nonzero(double x, const char* what) {
  if (x == 0.0) throw PoleError(std::string(what) + ": evaluation on Z (x = 0)");
}

}  // namespace

CollarModel::CollarModel(int m, double delta, int leaf_dim, LaurentData laurent)
    : m_(m), delta_(delta), leaf_dim_(leaf_dim), laurent_(std::move(laurent)) {
  if (m_ < 1) throw std::invalid_argument("collar: singularity order m must be >= 1");
  if (!(delta_ > 0.0)) throw std::invalid_argument("collar: half-width delta must be > 0");
  if (leaf_dim_ < 0) throw std::invalid_argument("collar: leaf_dim must be >= 0");
  if (static_cast<int>(laurent_.alpha.size()) != m_)
    throw DimensionError("collar: expected " + std::to_string(m_) + " alpha covectors, got " +
                         std::to_string(laurent_.alpha.size()));
  const auto n = laurent_.alpha.front().size();
  for (const auto& a : laurent_.alpha)
    if (a.size() != n) throw DimensionError("collar: alpha covectors differ in length");
  if (laurent_.alpha.back().isZero(0.0))
    throw std::invalid_argument("collar: alpha_m must be nonzero");
  if (laurent_.beta.size() == 0) laurent_.beta = Eigen::MatrixXd::Zero(n, n);
  if (laurent_.beta.rows() != n || laurent_.beta.cols() != n)
    throw DimensionError("collar: beta must be a square matrix on the Z frame");
  if (!(laurent_.beta + laurent_.beta.transpose()).isZero(0.0))
    throw std::invalid_argument("collar: beta must be antisymmetric");
}

double singular_density(std::span<const double> w, double x) {
  require_nonzero(x, "singular_density");
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * std::pow(x, -static_cast<int>(j + 1));
  return sum;
}

double singular_primitive(std::span<const double> w, double x) {
  require_nonzero(x, "singular_primitive");
  if (w.empty()) return 0.0;
  double sum = w[0] * std::log(std::abs(x));
  for (std::size_t i = 2; i <= w.size(); ++i)
    sum += w[i - 1] * std::pow(x, -static_cast<int>(i - 1)) / static_cast<double>(i - 1);
  return sum;
}

double singular_primitive_derivative(std::span<const double> w, double x) {
  require_nonzero(x, "singular_primitive_derivative");
  if (w.empty()) return 0.0;
  double sum = w[0] / x;
  for (std::size_t i = 2; i <= w.size(); ++i) sum -= w[i - 1] * std::pow(x, -static_cast<int>(i));
  return sum;
}

std::vector<double> moment_density_coefficients(std::span<const double> w) {
  std::vector<double> c(w.begin(), w.end());
  for (std::size_t j = 1; j < c.size(); ++j) c[j] = -c[j];
  return c;
}

double eval_bm_form(const CollarModel& collar, double x, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v) {
  require_nonzero(x, "eval_bm_form");
  const int n = collar.frame_dim();
  if (u.size() != n + 1 || v.size() != n + 1)
    throw DimensionError("eval_bm_form: tangent vectors must have length " + std::to_string(n + 1));
  const auto uz = u.tail(n);
  const auto vz = v.tail(n);
  const auto& laurent = collar.laurent();
  double value = 0.0;
  for (int j = 1; j <= collar.order(); ++j) {
    const auto& alpha = laurent.alpha[j - 1];
    // (dx ^ alpha)(u, v) = u_x alpha(v) - v_x alpha(u)
    value += std::pow(x, -j) * (u(0) * alpha.dot(vz) - v(0) * alpha.dot(uz));
  }
  // Pairs (i, k) and (k, i) are combined so that swapping u and v negates every term exactly.
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) value += laurent.beta(i, k) * (uz(i) * vz(k) - uz(k) * vz(i));
  return value;
}

LaurentFit fit_laurent_coefficients(std::span<const std::pair<double, double>> samples, int m,
                                    int smooth_degree) {
  if (m < 1) throw std::invalid_argument("fit_laurent_coefficients: m must be >= 1");
  if (smooth_degree < 0) throw std::invalid_argument("fit_laurent_coefficients: negative smooth degree");
  const int cols = m + smooth_degree + 1;
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows < cols)
    throw RankDeficientError("fit_laurent_coefficients: need at least " + std::to_string(cols) +
                             " samples, got " + std::to_string(rows));

  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto [x, value] = samples[static_cast<std::size_t>(r)];
    if (x == 0.0) throw PoleError("fit_laurent_coefficients: sample at x = 0");
    design(r, 0) = std::log(std::abs(x));
    for (int i = 1; i < m; ++i) design(r, i) = std::pow(x, -i);
    for (int k = 0; k <= smooth_degree; ++k) design(r, m + k) = std::pow(x, k);
    rhs(r) = value;
  }

  // Column equilibration keeps the negative powers from swamping the rank test.
  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < cols; ++c)
    if (scale(c) == 0.0) throw RankDeficientError("fit_laurent_coefficients: zero basis column");
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols)
    throw RankDeficientError("fit_laurent_coefficients: design matrix has rank " +
                             std::to_string(qr.rank()) + " < " + std::to_string(cols));
  const Eigen::VectorXd coeffs = qr.solve(rhs).cwiseQuotient(scale);

  LaurentFit fit;
  fit.w.resize(static_cast<std::size_t>(m));
  fit.w[0] = coeffs(0);
  for (int i = 2; i <= m; ++i) fit.w[static_cast<std::size_t>(i - 1)] = static_cast<double>(i - 1) * coeffs(i - 1);
  for (int k = 0; k <= smooth_degree; ++k) fit.smooth.push_back(coeffs(m + k));
  fit.residual = (design * coeffs - rhs).norm();
  return fit;
}

}  // namespace bm

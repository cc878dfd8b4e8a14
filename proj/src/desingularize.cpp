#include "bm/desingularize.hpp"

#include "bm/errors.hpp"
#include "bm/parallel.hpp"
#include "bm/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numbers>
#include <string>

namespace bm {
namespace {

double falling_factorial(int n, int r) {
  if (r > n) return 0.0;
  double out = 1.0;
  for (int i = 0; i < r; ++i) out *= n - i;
  return out;
}

// Truncated power series arithmetic for the derivative jets.
using Series = std::vector<double>;

Series multiply(const Series& a, const Series& b) {
  Series out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Series exp_series(const Series& g) {
  Series e(g.size(), 0.0);
  e[0] = std::exp(g[0]);
  for (std::size_t n = 1; n < g.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += static_cast<double>(k) * g[k] * e[n - k];
    e[n] = acc / static_cast<double>(n);
  }
  return e;
}

}  // namespace

DesingProfile::DesingProfile(int m, double eps) : m_(m), eps_(eps) {
  if (m < 1) throw std::invalid_argument("desing profile: order must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("desing profile: eps must be > 0");
  // Match G(u) = g(u^2) to -p log u at u = 1 in derivatives 0..m-1.
  const double p = odd() ? m + 1 : m;
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b(m);
  double factorial = 1.0;  // (r - 1)!
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < m; ++k) A(r, k) = falling_factorial(2 * k, r);
    if (r == 0) {
      b[r] = 0.0;
    } else {
      b[r] = -p * ((r - 1) % 2 == 0 ? 1.0 : -1.0) * factorial;
      factorial *= r;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw SingularSystemError("desing profile: matching system of order " + std::to_string(m) +
                              " is singular");
  const Eigen::VectorXd c = lu.solve(b);
  if (!c.allFinite() || (A * c - b).norm() > 1e-8 * std::max(1.0, b.norm()))
    throw SingularSystemError("desing profile: matching system of order " + std::to_string(m) +
                              " is numerically singular");
  g_.assign(c.data(), c.data() + m);
  full_inner_ = inner_integral(1.0);
}

double DesingProfile::inner_integral(double u) const {
  const auto f = [this](double t) {
    double g = 0.0;
    for (auto c = g_.rbegin(); c != g_.rend(); ++c) g = g * (t * t) + *c;
    return odd() ? t * std::exp(g) : std::exp(g);
  };
  return adaptive_simpson(f, 0.0, u);
}

std::vector<double> DesingProfile::jet(double x, int count, bool inner) const {
  if (count <= 0) return {};
  if (x == 0.0 && !inner) throw PoleError("desing profile: outer branch evaluated at 0");
  Series out(count, 0.0);
  if (!inner) {
    // Coefficients of (x + h)^{-m}: binom(-m, r) x^{-m-r}.
    double binom = 1.0;
    for (int r = 0; r < count; ++r) {
      out[r] = binom * std::pow(x, -m_ - r);
      binom *= static_cast<double>(-m_ - r) / (r + 1);
    }
    return out;
  }
  const double u0 = x / eps_;
  Series u(count, 0.0);
  u[0] = u0;
  if (count > 1) u[1] = 1.0 / eps_;
  const Series s = multiply(u, u);
  Series g(count, 0.0);
  for (auto c = g_.rbegin(); c != g_.rend(); ++c) {
    g = multiply(g, s);
    g[0] += *c;
  }
  Series q = exp_series(g);
  if (odd()) q = multiply(q, u);
  const double scale = std::pow(eps_, -m_);
  for (auto& v : q) v *= scale;
  return q;
}

std::vector<double> DesingProfile::derivatives(double x, int count, bool inner) const {
  auto out = jet(x, count, inner);
  double factorial = 1.0;
  for (int r = 0; r < count; ++r) {
    if (r > 0) factorial *= r;
    out[r] *= factorial;
  }
  return out;
}

double DesingProfile::primitive(double x) const {
  const double ax = std::abs(x);
  const double inner_scale = std::pow(eps_, 1 - m_);
  double value;
  if (ax <= eps_) {
    value = inner_scale * inner_integral(ax / eps_);
  } else {
    const double outer = m_ == 1 ? std::log(ax / eps_)
                                 : (inner_scale - std::pow(ax, 1 - m_)) / (m_ - 1);
    value = inner_scale * full_inner_ + outer;
  }
  if (!odd() && x < 0) value = -value;
  return value;
}

DesingProfile build_profile(int m, double eps) { return DesingProfile(m, eps); }

DesingFamily::DesingFamily(int m, double eps) : eps_(eps) {
  profiles_.reserve(m);
  for (int j = 1; j <= m; ++j) profiles_.emplace_back(j, eps);
}

double DesingFamily::density(std::span<const double> w, double x) const {
  const auto c = moment_density_coefficients(w);
  double sum = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0.0) sum += c[j] * profiles_.at(j)(x);
  return sum;
}

double desing_primitive(const DesingFamily& family, std::span<const double> w, double x) {
  if (static_cast<int>(w.size()) > family.order())
    throw DimensionError("desing_primitive: more weights than desingularized orders");
  const auto c = moment_density_coefficients(w);
  double sum = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0.0) sum += c[j] * family.profile(static_cast<int>(j + 1)).primitive(x);
  return sum;
}

double desing_primitive(const DesingProfile& profile, std::span<const double> w, double x) {
  if (static_cast<int>(w.size()) != profile.order())
    throw DimensionError("desing_primitive: expected one weight per order up to the profile's");
  for (std::size_t j = 0; j + 1 < w.size(); ++j)
    if (w[j] != 0.0)
      throw DimensionError("desing_primitive: a single profile only carries the top order");
  return moment_density_coefficients(w).back() * profile.primitive(x);
}

DesingMoment::DesingMoment(const ScenarioModel& model, double eps)
    : model_(&model), w_(model.xi_weights()), family_(model.order(), eps) {
  if (const auto* circle = std::get_if<CircleGluedModel>(&model.geometry)) {
    const int r = circle->zero_count;
    const double half = 2.0 / r * std::asin(std::min(eps, 1.0));
    for (int i = 0; i <= r; ++i) {
      const double z = 2.0 * std::numbers::pi * i / r;
      breakpoints_.insert(breakpoints_.end(), {z - half, z, z + half});
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
  }
}

double DesingMoment::density(double base) const {
  return family_.density(w_, defining_function(model_->geometry, base));
}

double DesingMoment::integral(double from, double to) const {
  const auto c = moment_density_coefficients(w_);
  double scale = 1.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    scale = std::max(scale, std::abs(c[j]) * std::pow(eps(), -static_cast<double>(j)));
  QuadratureTolerance tol;
  tol.absolute = 1e-13 * scale;
  return adaptive_simpson([this](double t) { return density(t); }, from, to, breakpoints_, tol);
}

double DesingMoment::value(const ComponentSegment& segment, double base) const {
  if (std::holds_alternative<CircleGluedModel>(model_->geometry))
    return integral(segment.center, base);
  const double v = desing_primitive(family_, w_, base);
  if (segment.center == 0.0) return v;
  return v - desing_primitive(family_, w_, segment.center);
}

std::vector<double> DesingMoment::values(const ComponentSegment& segment,
                                         std::span<const double> bases, int threads) const {
  std::vector<double> out(bases.size());
  if (!std::holds_alternative<CircleGluedModel>(model_->geometry)) {
    parallel_for(bases.size(), threads, [&](std::size_t i) { out[i] = value(segment, bases[i]); });
    return out;
  }
  std::vector<double> knots(bases.begin(), bases.end());
  knots.push_back(segment.center);
  std::sort(knots.begin(), knots.end());
  std::vector<double> pieces(knots.size() - 1);
  parallel_for(pieces.size(), threads,
               [&](std::size_t i) { pieces[i] = integral(knots[i], knots[i + 1]); });
  const auto center_pos = static_cast<std::size_t>(
      std::lower_bound(knots.begin(), knots.end(), segment.center) - knots.begin());
  std::vector<double> cumulative(knots.size(), 0.0);
  for (std::size_t i = center_pos; i + 1 < knots.size(); ++i)
    cumulative[i + 1] = cumulative[i] + pieces[i];
  for (std::size_t i = center_pos; i > 0; --i) cumulative[i - 1] = cumulative[i] - pieces[i - 1];
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const auto k = std::lower_bound(knots.begin(), knots.end(), bases[i]) - knots.begin();
    out[i] = cumulative[k];
  }
  return out;
}

double DesingMoment::component_max(const ComponentSegment& segment) const {
  constexpr int kGrid = 1025;
  std::vector<double> bases(kGrid);
  for (int i = 0; i < kGrid; ++i)
    bases[i] = segment.lo + (segment.hi - segment.lo) * i / (kGrid - 1);
  const auto v = values(segment, bases);
  int best = 0;
  for (int i = 1; i < kGrid; ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  double result = std::abs(v[best]);
  if (best == 0 || best == kGrid - 1) return result;

  // Interior maximum: golden-section refinement of |xi| on the bracketing cells.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = bases[best - 1], b = bases[best + 1];
  const auto objective = [&](double t) { return std::abs(value(segment, t)); };
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
    }
  }
  return std::max({result, fc, fd});
}

double compute_a_eps(const ScenarioModel& model, double eps) {
  const DesingMoment moment(model, eps);
  double a = 0.0;
  for (const auto& seg : component_segments(model)) a = std::max(a, moment.component_max(seg));
  return a;
}

}  // namespace bm

namespace bm {

DesingContract check_desing_contract(const DesingProfile& q, double outer, double relative_tol, int samples) {
  DesingContract c;
  c.order = q.order();
  const int m = q.order();
  const double eps = q.eps();

  c.outer_exact = true;
  for (int i = 0; i < samples; ++i) {
    const double x = eps + (outer - eps) * i / (samples - 1);
    for (double y : {x, -x})
      if (q(y) != std::pow(y, -m)) c.outer_exact = false;
  }

  for (double x : {eps, -eps}) {
    const auto in = q.derivatives(x, m, true);
    const auto out = q.derivatives(x, m, false);
    for (int r = 0; r < m; ++r)
      c.jet_mismatch = std::max(c.jet_mismatch, std::abs(in[r] - out[r]) / std::abs(out[r]));
  }
  c.jets_pass = c.jet_mismatch <= relative_tol;

  c.parity = true;
  c.sign = q.odd() ? q(0.0) == 0.0 : q(0.0) > 0.0;
  for (int i = 1; i < samples; ++i) {
    const double x = eps * i / samples;
    const double a = q(x), b = q(-x);
    if (b != (q.odd() ? -a : a)) c.parity = false;
    if (!(a > 0.0)) c.sign = false;
    if (q.odd() ? !(b < 0.0) : !(b > 0.0)) c.sign = false;
  }
  c.pass = c.outer_exact && c.jets_pass && c.parity && c.sign;
  return c;
}

}  // namespace bm

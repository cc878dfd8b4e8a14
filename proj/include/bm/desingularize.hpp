#pragma once

// Smooth replacements of the pole densities x^{-j} on [-eps, eps] and the resulting
// desingularized moment map.

#include "bm/hamiltonian.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace bm {

/// Density q(x) equal to x^{-m} for |x| >= eps. Inside, with u = x / eps and s = u^2,
///   even m: q = eps^{-m} exp(g(s))        (even, positive)
///   odd m:  q = x eps^{-m-1} exp(g(s))    (odd, single transversal zero at 0)
/// where g has degree m - 1 and matches value and m - 1 derivatives at |x| = eps.
class DesingProfile {
 public:
  DesingProfile(int m, double eps);

  int order() const { return m_; }
  double eps() const { return eps_; }
  bool odd() const { return m_ % 2 == 1; }
  /// Coefficients of g, constant term first.
  const std::vector<double>& log_coefficients() const { return g_; }

  double operator()(double x) const { return value(x); }

  template <class T>
  T value(T x) const {
    using std::abs, std::exp, std::pow;
    if (abs(x) >= T(eps_)) return pow(x, -m_);
    const T e(eps_);
    const T u = x / e;
    const T s = u * u;
    T g(0);
    for (auto c = g_.rbegin(); c != g_.rend(); ++c) g = g * s + T(*c);
    const T scale = pow(e, -m_) * exp(g);
    return odd() ? u * scale : scale;
  }

  /// Taylor coefficients q^{(r)}(x) / r!, r = 0..count-1, on the branch selected by
  /// `inner` (the polynomial-exponential expression or x^{-m}), at any x != 0.
  std::vector<double> jet(double x, int count, bool inner) const;
  /// Derivatives q^{(r)}(x), r = 0..count-1, on the chosen branch.
  std::vector<double> derivatives(double x, int count, bool inner) const;

  /// integral_0^x q. Even m gives an odd primitive, odd m an even one.
  double primitive(double x) const;

 private:
  double inner_integral(double u) const;  // integral_0^u of the normalized inner density

  int m_;
  double eps_;
  std::vector<double> g_;
  double full_inner_ = 0.0;
};

/// Builds the profile; throws SingularSystemError if the matching system is singular.
DesingProfile build_profile(int m, double eps);

/// Profiles of orders 1..m for one eps.
class DesingFamily {
 public:
  DesingFamily(int m, double eps);

  int order() const { return static_cast<int>(profiles_.size()); }
  double eps() const { return eps_; }
  const DesingProfile& profile(int j) const { return profiles_.at(j - 1); }

  /// sum_j c_j q^{(j)}(x) with c the moment density coefficients of w.
  double density(std::span<const double> w, double x) const;

 private:
  double eps_;
  std::vector<DesingProfile> profiles_;
};

/// xi-component of the desingularized moment map on a collar:
///   integral_0^x sum_j c_j q^{(j)}(t) dt, c_1 = w_1, c_j = -w_j (j >= 2),
/// which differs from singular_primitive(w, x) by a side-dependent constant for |x| >= eps.
double desing_primitive(const DesingFamily& family, std::span<const double> w, double x);
/// Single-order convenience: `profile` desingularizes order profile.order() only, and w
/// must have that many entries with only the last one nonzero.
double desing_primitive(const DesingProfile& profile, std::span<const double> w, double x);

/// Desingularized xi-component on every geometry, centered to 0 at each component's
/// center point.
class DesingMoment {
 public:
  /// Keeps a reference to `model`, which must outlive this object.
  DesingMoment(const ScenarioModel& model, double eps);

  const ScenarioModel& model() const { return *model_; }
  const DesingFamily& family() const { return family_; }
  double eps() const { return family_.eps(); }

  /// Desingularized xi-density at a base coordinate.
  double density(double base) const;
  /// Value at one base coordinate of a component.
  double value(const ComponentSegment& segment, double base) const;
  /// Values at sorted base coordinates of one component.
  std::vector<double> values(const ComponentSegment& segment, std::span<const double> bases,
                             int threads = 1) const;
  /// max |xi| over one component.
  double component_max(const ComponentSegment& segment) const;

 private:
  double integral(double from, double to) const;

  const ScenarioModel* model_;
  std::vector<double> w_;
  DesingFamily family_;
  std::vector<double> breakpoints_;
};

/// a_eps: max over every component of the centered |xi-component|.
double compute_a_eps(const ScenarioModel& model, double eps);

/// Sampled check of one profile against its stated properties.
struct DesingContract {
  int order = 0;
  bool outer_exact = false;   ///< q(x) == x^{-m} bit for bit on eps <= |x| <= outer
  double jet_mismatch = 0.0;  ///< max relative gap of derivatives 0..m-1 across |x| = eps
  bool jets_pass = false;
  bool parity = false;        ///< q(-x) = (-1)^m q(x)
  bool sign = false;          ///< even m: q > 0; odd m: sign(q) = sign(x), q(0) = 0
  bool pass = false;
};

DesingContract check_desing_contract(const DesingProfile& profile, double outer, double relative_tol,
                                     int samples = 257);

}  // namespace bm

#include "doctest.h"

#include "bm/desingularize.hpp"
#include "bm/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>

using bm::DesingProfile;
using Real = boost::multiprecision::cpp_bin_float_50;

namespace {

// Taylor polynomial of -(p/2) log s at s = 1 to degree m - 1, expanded in powers of s.
std::vector<double> taylor_log_coefficients(int m) {
  const double p = m % 2 == 1 ? m + 1 : m;
  std::vector<double> out(m, 0.0);
  for (int k = 1; k < m; ++k) {
    // (s - 1)^k = sum_i binom(k, i) s^i (-1)^{k-i}
    const double term = -(p / 2.0) * ((k + 1) % 2 == 0 ? 1.0 : -1.0) / k;
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      out[i] += term * binom * ((k - i) % 2 == 0 ? 1.0 : -1.0);
      binom = binom * (k - i) / (i + 1);
    }
  }
  return out;
}

// Fornberg weights for the derivative of order r at z from nodes x.
std::vector<Real> fornberg(const std::vector<Real>& x, const Real& z, int r) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<Real>> c(n, std::vector<Real>(r + 1, Real(0)));
  Real c1 = 1, c4 = x[0] - z;
  c[0][0] = 1;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, r);
    Real c2 = 1;
    const Real c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const Real c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<Real> out(n);
  for (int i = 0; i < n; ++i) out[i] = c[i][r];
  return out;
}

// One-sided derivative of order r at x0 using nodes x0 + dir * k * h, in 50-digit arithmetic.
double one_sided_derivative(const DesingProfile& q, double x0, int r, int dir, double h) {
  const int n = r + 8;
  std::vector<Real> nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = Real(x0) + Real(dir * k) * Real(h);
  const auto wts = fornberg(nodes, Real(x0), r);
  Real sum = 0;
  for (int k = 0; k < n; ++k) {
    // The node x0 itself belongs to the outer branch; evaluate the inner branch just inside.
    const Real x = k == 0 && dir * x0 < 0 ? Real(x0) + Real(dir) * Real(1e-40) : nodes[k];
    sum += wts[k] * q.value(x);
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("profile coefficients equal the Taylor closed form") {
  for (int m = 1; m <= 8; ++m) {
    const DesingProfile q(m, 0.1);
    const auto expected = taylor_log_coefficients(m);
    REQUIRE(q.log_coefficients().size() == expected.size());
    for (int k = 0; k < m; ++k)
      CHECK(q.log_coefficients()[k] ==
            doctest::Approx(expected[k]).epsilon(1e-9).scale(std::max(1.0, std::abs(expected[k]))));
  }
}

TEST_CASE("profile examples") {
  CHECK(DesingProfile(2, 0.1)(0.2) == std::pow(0.2, -2));
  CHECK(DesingProfile(2, 0.1)(0.2) == doctest::Approx(25.0).epsilon(1e-15));
  const DesingProfile fold(1, 0.1);
  CHECK(fold(0.0) == 0.0);
  CHECK(fold(0.05) > 0.0);
  CHECK(fold(-0.05) < 0.0);
  CHECK_THROWS(DesingProfile(0, 0.1));
  CHECK_THROWS(DesingProfile(2, 0.0));
}

TEST_CASE("exact agreement outside the neighborhood") {
  for (int m = 1; m <= 6; ++m)
    for (double eps : {0.2, 0.05, 1e-3}) {
      const DesingProfile q(m, eps);
      for (double x : {eps, -eps, 1.5 * eps, -3.0 * eps, 0.5, -0.5, 1.0}) {
        if (std::abs(x) < eps) continue;
        CHECK(q(x) == std::pow(x, -m));
        CHECK(q(x) * std::pow(x, m) == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
}

TEST_CASE("parity, positivity and fold") {
  for (int m = 1; m <= 6; ++m) {
    const DesingProfile q(m, 0.1);
    for (int i = 0; i <= 400; ++i) {
      const double x = -0.3 + 0.6 * i / 400.0;
      if (m % 2 == 0) {
        CHECK(q(-x) == q(x));
        CHECK(q(x) > 0.0);
      } else {
        CHECK(q(-x) == -q(x));
        if (x != 0.0) CHECK(q(x) * x > 0.0);
      }
    }
    if (m % 2 == 1) {
      CHECK(q(0.0) == 0.0);
      CHECK(q.derivatives(0.0, 2, true)[1] > 0.0);
    }
  }
}

TEST_CASE("one-sided derivatives match at the matching points") {
  for (int m = 1; m <= 6; ++m) {
    const double eps = 0.1;
    const DesingProfile q(m, eps);
    for (double x0 : {eps, -eps}) {
      const auto inner = q.derivatives(x0, m, true);
      const auto outer = q.derivatives(x0, m, false);
      for (int r = 0; r < m; ++r) {
        const double h = 1e-4 * eps;
        const double fd_in = one_sided_derivative(q, x0, r, x0 > 0 ? -1 : 1, h);
        const double fd_out = one_sided_derivative(q, x0, r, x0 > 0 ? 1 : -1, h);
        const double scale = std::abs(outer[r]);
        CAPTURE(m);
        CAPTURE(r);
        CHECK(std::abs(fd_in - fd_out) <= 1e-5 * scale);
        CHECK(std::abs(inner[r] - outer[r]) <= 1e-9 * scale);
        CHECK(std::abs(fd_in - inner[r]) <= 1e-6 * scale);
      }
      // Order m is deliberately not matched.
      const auto in_m = q.derivatives(x0, m + 1, true)[m];
      const auto out_m = q.derivatives(x0, m + 1, false)[m];
      CHECK(std::abs(in_m - out_m) > 1e-6 * std::abs(out_m));
    }
  }
}

TEST_CASE("profiles coincide with x^-m away from the neighborhood") {
  const double x0 = 0.3;
  for (int m = 1; m <= 4; ++m)
    for (double eps : {0.2, 0.1, 0.05}) {
      const DesingProfile q(m, eps);
      for (int k = -5; k <= 5; ++k) {
        const double x = x0 + k * 1e-3;
        CHECK(q(x) == std::pow(x, -m));
      }
      CHECK(q.derivatives(x0, m, false) == DesingProfile(m, 0.01).derivatives(x0, m, false));
    }
}

TEST_CASE("primitive against Gauss-Kronrod quadrature") {
  using boost::math::quadrature::gauss_kronrod;
  for (int m = 1; m <= 6; ++m) {
    const double eps = 0.1;
    const DesingProfile q(m, eps);
    CHECK(q.primitive(0.0) == 0.0);
    for (double x : {0.03, 0.07, 0.1, 0.25, 0.5}) {
      const auto f = [&](double t) { return q(t); };
      const double ref = gauss_kronrod<double, 31>::integrate(f, 0.0, std::min(x, eps), 12, 1e-14) +
                         (x > eps ? gauss_kronrod<double, 31>::integrate(f, eps, x, 12, 1e-14) : 0.0);
      CHECK(q.primitive(x) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(q.primitive(-x) == doctest::Approx(m % 2 == 0 ? -ref : ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("desingularized primitive examples") {
  const bm::DesingFamily fam(2, 0.1);
  const std::vector<double> w{0, 1};
  CHECK(bm::desing_primitive(fam, w, 0.0) == 0.0);
  for (double x : {0.05, 0.2, 0.45})
    CHECK(bm::desing_primitive(fam, w, x) - bm::desing_primitive(fam, w, -x) ==
          doctest::Approx(2 * bm::desing_primitive(fam, w, x)).epsilon(1e-14));
  // c_2 = -w_2, so the collar primitive decreases by 1/0.1 - 1/0.5 = 8 between 0.1 and 0.5.
  CHECK(bm::desing_primitive(fam, w, 0.5) - bm::desing_primitive(fam, w, 0.1) ==
        doctest::Approx(-8.0).epsilon(1e-12));
  const DesingProfile q2(2, 0.1);
  CHECK(bm::desing_primitive(q2, w, 0.3) == bm::desing_primitive(fam, w, 0.3));
  CHECK_THROWS_AS(bm::desing_primitive(q2, std::vector<double>{1, 1}, 0.3), bm::DimensionError);
}

TEST_CASE("desingularized primitive is the singular primitive plus side constants") {
  const std::vector<double> w{0.4, -1.2, 0.9, 0.3};
  const bm::DesingFamily fam(4, 0.05);
  for (double sign : {-1.0, 1.0}) {
    const double base = bm::desing_primitive(fam, w, sign * 0.05) - bm::singular_primitive(w, sign * 0.05);
    for (double ax : {0.07, 0.1, 0.3, 0.5}) {
      const double x = sign * ax;
      const double offset = bm::desing_primitive(fam, w, x) - bm::singular_primitive(w, x);
      CHECK(offset == doctest::Approx(base).epsilon(1e-10).scale(std::abs(base) + 1.0));
    }
  }
}

TEST_CASE("a_eps divergence and scaling") {
  bm::ScenarioModel m;
  m.torus = {2, 0};
  m.weights.a = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)};
  m.leaf = bm::LeafPolytope({Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)});
  const double delta = 0.5;
  m.geometry = bm::CollarGeometry{delta};
  double prev = 0.0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const double a = bm::compute_a_eps(m, eps);
    CHECK(a > prev);
    CHECK(a > 1 / eps - 1 / delta);
    const std::vector<double> w{0, 1};
    CHECK(a >= std::abs(bm::singular_primitive(w, eps) - bm::singular_primitive(w, delta)));
    prev = a;
  }
  auto doubled = m;
  for (auto& a : doubled.weights.a) a *= 2.0;
  CHECK(bm::compute_a_eps(doubled, 0.1) == doctest::Approx(2 * bm::compute_a_eps(m, 0.1)).epsilon(1e-14));

  // m = 1: logarithmic growth, successive differences approach 1 for eps = e^{-k}.
  bm::ScenarioModel log_model = m;
  log_model.weights.a = {Eigen::Vector2d(1, 0)};
  std::vector<double> a_k;
  for (int k = 2; k <= 8; ++k) a_k.push_back(bm::compute_a_eps(log_model, std::exp(-double(k))));
  for (std::size_t i = 1; i < a_k.size(); ++i) CHECK(a_k[i] - a_k[i - 1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("circle model: desingularized moment equals the closed form away from Z") {
  bm::ScenarioModel m;
  m.torus = {2, 0};
  m.weights.a = {Eigen::Vector2d(0.3, 0), Eigen::Vector2d(-1.0, 0)};
  m.leaf = bm::LeafPolytope({Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)});
  m.geometry = bm::CircleGluedModel{2};
  const double eps = 0.1;
  const bm::DesingMoment mom(m, eps);
  const auto segs = bm::component_segments(m);
  for (const auto& seg : segs) {
    std::vector<double> bases;
    for (int i = 0; i <= 64; ++i) bases.push_back(seg.lo + (seg.hi - seg.lo) * i / 64.0);
    const auto vals = mom.values(seg, bases, 2);
    for (std::size_t i = 0; i < bases.size(); ++i) {
      if (std::abs(std::sin(bases[i])) < eps) continue;
      CHECK(vals[i] == doctest::Approx(bm::moment_xi(m, bases[i])).epsilon(1e-9).scale(1.0));
      CHECK(vals[i] == doctest::Approx(mom.value(seg, bases[i])).epsilon(1e-9).scale(1.0));
    }
    // Symmetric about the component's midpoint.
    CHECK(vals.front() == doctest::Approx(-vals.back()).epsilon(1e-9));
  }
}

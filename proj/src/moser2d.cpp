#include "bm/moser2d.hpp"

#include "bm/errors.hpp"
#include "bm/parallel.hpp"
#include "bm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bm {
namespace {

constexpr double kInner = 0.1;  // cutoff is 1 up to kInner * delta
constexpr double kOuter = 0.9;  // and 0 from kOuter * delta on

double smootherstep(double s) { return s * s * s * s * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s))); }
double smootherstep_derivative(double s) { return 140.0 * s * s * s * (1.0 - s) * (1.0 - s) * (1.0 - s); }

double trig(const DensityMode& mode, double theta) {
  return mode.sine ? std::sin(mode.frequency * theta) : std::cos(mode.frequency * theta);
}

double ipow(double x, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

// integral_0^x s^q [chi(s)] ds; piecewise polynomial, so Gauss-Legendre is exact per piece.
double moment_integral(int q, bool cutoff, double x, double delta) {
  if (!cutoff) return ipow(x, q + 1) / (q + 1);
  const double sign = x < 0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  const auto f = [&](double s) { return ipow(sign * s, q) * collar_cutoff(s, delta); };
  double total = 0.0;
  double a = 0.0;
  for (double b : {kInner * delta, kOuter * delta, ax}) {
    b = std::min(b, ax);
    if (b > a) total += gauss_legendre20(f, a, b);
    a = std::max(a, b);
  }
  return sign * total;
}

// Pieces of the Moser construction for one form.
class MoserField {
 public:
  explicit MoserField(const Collar2DForm& form) : form_(form) {}

  double h(double x, double theta) const { return form_.density(x, theta); }

  // (h - h0) / x^m
  double r(double x, double theta) const {
    double sum = 0.0;
    for (std::size_t k = form_.m; k < form_.base.size(); ++k)
      sum += form_.base[k] * ipow(x, static_cast<int>(k) - form_.m);
    for (const auto& mode : form_.modes) {
      double term = mode.amplitude * ipow(x, mode.power - form_.m) * trig(mode, theta);
      if (mode.cutoff) term *= collar_cutoff(x, form_.delta);
      sum += term;
    }
    return sum;
  }

  // integral_0^x r(s, theta) ds
  double G(double x, double theta) const {
    double sum = 0.0;
    for (std::size_t k = form_.m; k < form_.base.size(); ++k) {
      const int q = static_cast<int>(k) - form_.m;
      sum += form_.base[k] * ipow(x, q + 1) / (q + 1);
    }
    for (const auto& mode : form_.modes)
      sum += mode.amplitude * trig(mode, theta) *
             moment_integral(mode.power - form_.m, mode.cutoff, x, form_.delta);
    return sum;
  }

  // H_t = h - t x^m (chi r + chi' G), the density of omega_t.
  double H(double t, double x, double theta) const {
    if (t == 0.0) return h(x, theta);
    const double chi = collar_cutoff(x, form_.delta);
    const double dchi = collar_cutoff_derivative(x, form_.delta);
    if (chi == 0.0 && dchi == 0.0) return h(x, theta);
    const double D = chi * r(x, theta) + dchi * G(x, theta);
    return h(x, theta) - t * ipow(x, form_.m) * D;
  }

  double velocity(double t, double x, double theta) const {
    const double chi = collar_cutoff(x, form_.delta);
    if (chi == 0.0) return 0.0;
    return chi * G(x, theta) * ipow(x, form_.m) / H(t, x, theta);
  }

 private:
  const Collar2DForm& form_;
};

struct Trajectory {
  double end;
  double max_speed;
};

Trajectory integrate(const MoserField& field, double x, double theta, int steps) {
  const double dt = 1.0 / steps;
  double y = x;
  double speed = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    const double k1 = field.velocity(t, y, theta);
    const double k2 = field.velocity(t + 0.5 * dt, y + 0.5 * dt * k1, theta);
    const double k3 = field.velocity(t + 0.5 * dt, y + 0.5 * dt * k2, theta);
    const double k4 = field.velocity(t + dt, y + dt * k3, theta);
    speed = std::max({speed, std::abs(k1), std::abs(k2), std::abs(k3), std::abs(k4)});
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {y, speed};
}

void check_nondegenerate(const Collar2DForm& form, const MoserField& field) {
  const double sign = form.base.empty() ? 0.0 : (form.base[0] > 0 ? 1.0 : -1.0);
  const int nx = 4 * (form.nx - 1) + 1, nt = 4 * form.ntheta;
  for (double t : {0.0, 1.0})
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j) {
        const double x = -form.delta + 2.0 * form.delta * i / (nx - 1);
        const double theta = 2.0 * std::numbers::pi * j / nt;
        const double value = field.H(t, x, theta);
        if (!(value * sign > 0.0)) {
          std::ostringstream msg;
          msg << "moser: omega_t degenerates at t = " << t << ", x = " << x << ", theta = " << theta
              << " (density " << value << ")";
          throw DegeneracyError(msg.str());
        }
      }
}

}  // namespace

double collar_cutoff(double x, double delta) {
  const double s = (std::abs(x) - kInner * delta) / ((kOuter - kInner) * delta);
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - smootherstep(s);
}

double collar_cutoff_derivative(double x, double delta) {
  const double s = (std::abs(x) - kInner * delta) / ((kOuter - kInner) * delta);
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double sign = x < 0 ? -1.0 : 1.0;
  return -sign * smootherstep_derivative(s) / ((kOuter - kInner) * delta);
}

double Collar2DForm::density(double x, double theta) const {
  double sum = 0.0;
  for (auto c = base.rbegin(); c != base.rend(); ++c) sum = sum * x + *c;
  for (const auto& mode : modes) {
    double term = mode.amplitude * ipow(x, mode.power) * trig(mode, theta);
    if (mode.cutoff) term *= collar_cutoff(x, delta);
    sum += term;
  }
  return sum;
}

double Collar2DForm::grid_theta(int j) const { return 2.0 * std::numbers::pi * j / ntheta; }

void validate_form(const Collar2DForm& form) {
  if (form.m < 1) throw std::invalid_argument("moser: m must be >= 1");
  if (!(form.delta > 0.0)) throw std::invalid_argument("moser: delta must be > 0");
  if (form.nx < 3 || form.ntheta < 1) throw ResolutionError("moser: grid must be at least 3 x 1");
  if (form.base.empty() || form.base[0] == 0.0)
    throw DegeneracyError("moser: h(0, theta) vanishes; the form is not a b^m-form");
  for (const auto& mode : form.modes)
    if (mode.power < form.m)
      throw std::invalid_argument("moser: perturbation x^" + std::to_string(mode.power) +
                                  " does not vanish to order m = " + std::to_string(form.m) +
                                  " at Z; only jet-preserving perturbations are supported");
}

Collar2DForm normal_form_target(const Collar2DForm& form) {
  validate_form(form);
  Collar2DForm out = form;
  out.modes.clear();
  if (out.base.size() > static_cast<std::size_t>(form.m)) out.base.resize(form.m);
  return out;
}

double moser_map(const Collar2DForm& form, double x, double theta, int steps) {
  validate_form(form);
  if (steps < 1) throw std::invalid_argument("moser: steps must be >= 1");
  const MoserField field(form);
  return integrate(field, x, theta, steps).end;
}

MoserResult moser_flow(const Collar2DForm& form, int steps, int threads) {
  validate_form(form);
  if (steps < 1) throw std::invalid_argument("moser: steps must be >= 1");
  const MoserField field(form);
  check_nondegenerate(form, field);

  const int nx = form.nx, nt = form.ntheta;
  MoserResult res;
  res.psi_x.resize(nx, nt);
  std::vector<double> speed(static_cast<std::size_t>(nx) * nt, 0.0);
  parallel_for(static_cast<std::size_t>(nx) * nt, threads, [&](std::size_t k) {
    const int i = static_cast<int>(k / nt), j = static_cast<int>(k % nt);
    const auto traj = integrate(field, form.grid_x(i), form.grid_theta(j), steps);
    res.psi_x(i, j) = traj.end;
    speed[k] = traj.max_speed;
  });
  res.max_speed = *std::max_element(speed.begin(), speed.end());
  const double dx = 2.0 * form.delta / (nx - 1);
  const double pitch = std::min(dx, 2.0 * std::numbers::pi / nt);
  if (res.max_speed / steps > pitch) {
    std::ostringstream msg;
    msg << "moser: |v| dt = " << res.max_speed / steps << " exceeds the grid pitch " << pitch
        << "; increase steps";
    throw StepSizeError(msg.str());
  }

  res.residual_field = Eigen::MatrixXd::Zero(nx, nt);
  for (int i = 1; i + 1 < nx; ++i)
    for (int j = 0; j < nt; ++j) {
      const double x = form.grid_x(i), theta = form.grid_theta(j);
      const double du = ((res.psi_x(i + 1, j) - form.grid_x(i + 1)) -
                         (res.psi_x(i - 1, j) - form.grid_x(i - 1))) / (2.0 * dx);
      const double jac = 1.0 + du;
      const double y = res.psi_x(i, j);
      const double ratio = x == 0.0 ? 1.0 / jac : x / y;
      const double pulled = field.H(1.0, y, theta) * ipow(ratio, form.m) * jac;
      res.residual_field(i, j) = pulled - field.h(x, theta);
      res.residual = std::max(res.residual, std::abs(res.residual_field(i, j)));
    }

  for (int i = 0; i < nx; ++i)
    if (std::abs(form.grid_x(i)) >= kOuter * form.delta)
      for (int j = 0; j < nt; ++j)
        res.outer_identity_defect = std::max(res.outer_identity_defect, std::abs(res.psi_x(i, j) - form.grid_x(i)));

  // Germ of psi_x at Z: value and derivatives 1..m of the displacement at x = 0.
  const double hs = 1e-2 * form.delta;
  for (int j = 0; j < nt; ++j) {
    const double theta = form.grid_theta(j);
    const auto u = [&](double x) { return integrate(field, x, theta, steps).end - x; };
    res.germ_defect = std::max(res.germ_defect, std::abs(u(0.0)));
    const double up = u(hs), um = u(-hs), up2 = u(2 * hs), um2 = u(-2 * hs), u0 = u(0.0);
    const double d[] = {(up - um) / (2 * hs), (up - 2 * u0 + um) / (hs * hs),
                        (up2 - 2 * up + 2 * um - um2) / (2 * hs * hs * hs)};
    for (int k = 1; k <= std::min(form.m, 3); ++k)
      res.germ_defect = std::max(res.germ_defect, std::abs(d[k - 1]));
  }
  return res;
}

namespace {

double fit_slope(const std::vector<double>& spacing, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(spacing.size());
  for (std::size_t i = 0; i < spacing.size(); ++i) {
    const double lx = std::log(spacing[i]), ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ConvergenceStudy grid_convergence(const Collar2DForm& form, const std::vector<int>& sizes, int steps,
                                  int threads) {
  ConvergenceStudy study;
  study.parameter = "grid";
  for (int n : sizes) {
    Collar2DForm f = form;
    f.nx = n;
    f.ntheta = n;
    study.values.push_back(n);
    study.spacing.push_back(2.0 * form.delta / (n - 1));
    study.errors.push_back(moser_flow(f, steps, threads).residual);
  }
  study.slope = fit_slope(study.spacing, study.errors);
  return study;
}

ConvergenceStudy step_convergence(const Collar2DForm& form, const std::vector<int>& steps,
                                  int reference_steps, int threads) {
  ConvergenceStudy study;
  study.parameter = "steps";
  const auto reference = moser_flow(form, reference_steps, threads);
  for (int s : steps) {
    const auto res = moser_flow(form, s, threads);
    study.values.push_back(s);
    study.spacing.push_back(1.0 / s);
    study.errors.push_back((res.psi_x - reference.psi_x).cwiseAbs().maxCoeff());
  }
  study.slope = fit_slope(study.spacing, study.errors);
  return study;
}

}  // namespace bm

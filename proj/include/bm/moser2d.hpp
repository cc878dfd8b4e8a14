#pragma once

// Moser path on a 2-D collar (-delta, delta) x S^1 with
//   omega = h(x, theta) / x^m dx ^ dtheta,
// pulling omega back to its Laurent normal form.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bm {

/// One perturbation term amplitude * x^power * [chi(x)] * (cos | sin)(frequency * theta).
struct DensityMode {
  double amplitude = 0.0;
  int power = 1;
  int frequency = 1;
  bool sine = true;
  bool cutoff = true;
};

/// C^3 cutoff: 1 on |x| <= 0.1 delta, smootherstep down to 0 at 0.9 delta, 0 beyond.
double collar_cutoff(double x, double delta);
double collar_cutoff_derivative(double x, double delta);

struct Collar2DForm {
  int m = 1;
  double delta = 0.5;
  int nx = 64;
  int ntheta = 64;
  std::vector<double> base;  ///< theta-independent polynomial part, constant term first
  std::vector<DensityMode> modes;

  double density(double x, double theta) const;
  double grid_x(int i) const { return -delta + 2.0 * delta * i / (nx - 1); }
  double grid_theta(int j) const;
};

/// Checks grid sizes, h(0, .) != 0 and that every mode vanishes to order m at x = 0.
/// Throws std::invalid_argument, ResolutionError or DegeneracyError.
void validate_form(const Collar2DForm& form);

/// Laurent normal form: the theta-independent jet of order < m. The x-jet of h at 0 up
/// to order m - 1 (theta-averaged) is carried over exactly.
Collar2DForm normal_form_target(const Collar2DForm& form);

struct MoserResult {
  Eigen::MatrixXd psi_x;  ///< psi_x at grid point (i, j); psi_theta is the identity
  double residual = 0.0;  ///< max |h0c(psi) (x / psi_x)^m d_x psi_x - h| over interior grid points
  Eigen::MatrixXd residual_field;
  double max_speed = 0.0;
  double outer_identity_defect = 0.0;  ///< max |psi_x - x| on the outer 10% of the collar
  double germ_defect = 0.0;            ///< |psi_x(0)| and derivatives 1..m of psi_x - x at 0
};

/// Integrates d psi/dt = v_t(psi), iota_{v_t} omega_t = chi G dtheta, with RK4 in t.
/// Throws DegeneracyError if omega_t changes sign, StepSizeError if |v| dt exceeds the
/// grid pitch.
MoserResult moser_flow(const Collar2DForm& form, int steps, int threads = 1);

/// psi_x of a single point.
double moser_map(const Collar2DForm& form, double x, double theta, int steps);

struct ConvergenceStudy {
  std::string parameter;  ///< "grid" or "steps"
  std::vector<int> values;
  std::vector<double> spacing;  ///< grid pitch or dt
  std::vector<double> errors;
  double slope = 0.0;  ///< least-squares slope of log error against log spacing
};

/// Residual under grid refinement (steps fixed): expected slope 2.
ConvergenceStudy grid_convergence(const Collar2DForm& form, const std::vector<int>& sizes, int steps,
                                  int threads = 1);
/// max |psi_x - psi_x(reference_steps)| under dt refinement (grid fixed): expected slope 4.
ConvergenceStudy step_convergence(const Collar2DForm& form, const std::vector<int>& steps,
                                  int reference_steps, int threads = 1);

}  // namespace bm

#pragma once

#include <cmath>
#include <functional>
#include <span>

namespace bm {

struct QuadratureTolerance {
  double absolute = 1e-10;
  double relative = 0.0;
  int max_depth = 48;
};

/// Adaptive Simpson on [a, b]. The local acceptance test is
/// |S(left) + S(right) - S(whole)| <= 15 * max(absolute, relative * |S(whole)|),
/// with the absolute budget halved at each bisection.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        QuadratureTolerance tol = {});

/// Same as above, but the interval is first split at the given breakpoints
/// (those outside (a, b) are ignored). Use this where the integrand is only
/// finitely smooth at known points.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breakpoints, QuadratureTolerance tol = {});

/// Fixed 20-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 39.
double gauss_legendre20(const std::function<double(double)>& f, double a, double b);

}  // namespace bm

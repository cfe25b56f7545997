#pragma once

#include <array>
#include <functional>
#include <vector>

#include "speculus/piecewise.hpp"

namespace speculus {

struct QuadOptions {
  double tol = 1e-10;
  int max_depth = 30;
};

// 15-point Gauss-Legendre rule on [-1, 1].
const std::array<double, 15>& gl15_nodes();
const std::array<double, 15>& gl15_weights();

// Adaptive dyadic Gauss-Legendre on [a, b]; `breaks` are extra split points.
// Throws QuadratureError when a panel does not converge.
double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breaks = {},
                 const QuadOptions& opt = {});

// Integral of a 1D piecewise function, split at its singular points.
double integrate_1d(const PiecewiseFn& f, double a, double b, const QuadOptions& opt = {});

// |int_a^b f - (F(b) - F(a))| plus the worst |F'_S - f| at singular points of
// F inside [a, b].
double antiderivative_check(const PiecewiseFn& f, const PiecewiseFn& F, double a, double b,
                            const QuadOptions& opt = {});

// Integral of f(y, s) over the backward characteristic triangle of (x0, t0):
// 0 <= s <= t0, x0 - (t0 - s) <= y <= x0 + (t0 - s). f is a function of (x, t).
double integrate_triangle(const PiecewiseFn& f, double x0, double t0, const QuadOptions& opt = {});

// Region that is both type I (a <= x <= b, lower(x) <= y <= upper(x)) and
// type II (c <= y <= d, left(y) <= x <= right(y)).
struct TypeIIIRegion {
  double a = 0, b = 0;
  std::function<double(double)> lower, upper;
  std::function<double(double)> dlower, dupper;  // optional, finite differences otherwise
  double c = 0, d = 0;
  std::function<double(double)> left, right;

  static TypeIIIRegion rectangle(double x0, double x1, double y0, double y1);
  // Triangle with vertices (x0, y0), (x1, y0), (x0, y1).
  static TypeIIIRegion right_triangle(double x0, double x1, double y0, double y1);
};

// Spot-check that the type I and type II descriptions agree on a grid.
bool region_consistent(const TypeIIIRegion& r, int n = 41);

double integrate_region(const PiecewiseFn& g, const TypeIIIRegion& r, const QuadOptions& opt = {});

struct GreenResult {
  double lhs = 0.0;  // double integral of (d^S_x P - d^S_y Q)
  double rhs = 0.0;  // counterclockwise line integral of P dy + Q dx
  double gap = 0.0;
  bool class_ok = false;  // P, Q continuous with proper specular fields
};

GreenResult green_check(const PiecewiseFn& P, const PiecewiseFn& Q, const TypeIIIRegion& r,
                        const QuadOptions& opt = {});

}  // namespace speculus

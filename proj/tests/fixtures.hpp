#pragma once

// Hand-built functions shared by the unit tests and the acceptance binary.

#include <cmath>
#include <vector>

#include "speculus/piecewise.hpp"
#include "speculus/specular.hpp"

namespace fixtures {

using namespace speculus;

inline const Vars kX{"x"};
inline const Vars kXY{"x", "y"};
inline const Vars kXT{"x", "t"};

inline AffineForm form(std::vector<double> a, double b) { return AffineForm{std::move(a), b}; }

inline Branch row(const char* pattern, const char* expr, const Vars& vars) {
  return Branch{parse_pattern(pattern), parse(expr, vars), {}};
}

// Heaviside step with a chosen value at 0.
inline PiecewiseFn heaviside(double at0) {
  return from_branches({form({1}, 0)}, {row("+", "1", kX), row("-", "0", kX), Branch{{0}, constant(at0), {}}}, kX);
}

// q(x) = x|x|/2
inline PiecewiseFn q() { return from_expression("(1/2)*x*abs(x)", kX); }

// Force of the discontinuous example: -1 right of x = t, 0 between, +1 left of
// x = -t, with A-combined values on the lines. t > 0.
inline PiecewiseFn counterexample_force() {
  return from_branches({form({1, -1}, 0), form({1, 1}, 0)},
                       {row("++", "-1", kXT), row("-+", "0", kXT), row("--", "1", kXT)}, kXT,
                       {LinePolicy::SpecularCombination, LinePolicy::SpecularCombination}, {form({0, 1}, 0)});
}

inline PiecewiseFn counterexample_phi() {
  return from_branches({form({1}, 0)},
                       {row("+", "(1/2)*x^2 + 2*x", kX), row("-", "2*exp(x) - (1/2)*x^2 - 2", kX)}, kX,
                       {LinePolicy::SpecularCombination});
}

// The three-region closed form printed for the discontinuous example; the
// line x = t is assigned to the right region and x = -t to the middle one.
inline PiecewiseFn counterexample_printed_u() {
  return from_branches({form({1, -1}, 0), form({1, 1}, 0)},
                       {
                           row("++", "(1/2)*x^2 + 2*x", kXT),
                           row("0+", "(1/2)*x^2 + 2*x", kXT),
                           row("-+", "exp(x - t) + x*t + x + t - 1", kXT),
                           row("-0", "exp(x - t) + x*t + x + t - 1", kXT),
                           row("--", "exp(x + t) + exp(x - t) - (1/2)*x^2 - 2", kXT),
                       },
                       kXT, {}, {form({0, 1}, 0)});
}

// Half-line example data.
inline PiecewiseFn halfline_phi() { return from_expression("(x-1)*abs(x-1)/2 + x^2/2 + 1/2", kX); }
inline PiecewiseFn halfline_psi() { return from_expression("abs(x-1) - 1", kX); }

inline double qf(double s) { return 0.5 * s * std::abs(s); }

// Printed two-region closed form, x, t >= 0.
inline double halfline_closed(double x, double t) {
  if (x >= t) return qf(x + t - 1) + 0.5 * x * x + 0.5 * t * t - t + 0.5;
  return qf(t + x - 1) - qf(t - x - 1) + x * t - x;
}

}  // namespace fixtures

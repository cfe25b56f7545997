#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "speculus/piecewise.hpp"

namespace speculus {

// tan((atan(alpha) + atan(beta)) / 2); total, symmetric, 0 at beta = -alpha.
double a_combine(double alpha, double beta);

struct SemiDerivativePair {
  double right = 0.0;  // alpha: derivative of the +e_i adjacent branch
  double left = 0.0;   // beta:  derivative of the -e_i adjacent branch
  std::size_t axis = 0;
  bool numeric = false;  // finite-difference fallback was used
};

SemiDerivativePair semi_derivatives(const PiecewiseFn& u, std::span<const double> p, std::size_t axis);
double specular_partial(const PiecewiseFn& u, std::span<const double> p, std::size_t axis);

struct FieldInfo {
  std::size_t constant_rows = 0;  // on-line rows folded to constants
  std::size_t closure_rows = 0;   // on-line rows evaluated pointwise
};

// Specular derivative of u along `axis` as a piecewise function on the same forms.
PiecewiseFn specular_field(const PiecewiseFn& u, std::size_t axis, FieldInfo* info = nullptr);

// u composed with the reflection x_axis -> -x_axis.
PiecewiseFn reflect(const PiecewiseFn& u, std::size_t axis);
double odd_reflection_check(const PiecewiseFn& u, std::span<const double> p, std::size_t axis);

struct Phototangent {
  double x = 0.0;
  double right_slope = 0.0;  // alpha
  double left_slope = 0.0;   // beta
  double left_value = 0.0;   // u(x]
  double right_value = 0.0;  // u[x)
  double center = 0.0;       // u[x]
  bool continuous = false;

  double operator()(double y) const;
};

Phototangent phototangent(const PiecewiseFn& u, double x);

bool ftc_condition_check(const PiecewiseFn& f, const SamplingOptions& opt = {});

// Highest k in {0, 1, 2} with u in S^k on the real line, or -1 if u is not
// even proper.
int specular_order_1d(const PiecewiseFn& u, const SamplingOptions& opt = {});

enum class S2Verdict { S2, S1Only, S0Only, Fails };
std::string to_string(S2Verdict v);

struct S2Report {
  bool continuous = false;
  bool classical_first[2] = {false, false};   // u_x, u_y exist classically
  bool first_fields_proper[2] = {false, false};
  bool second_fields_proper[4] = {false, false, false, false};  // xx, yx, xy, yy
  bool mixed_continuous = false;
  double symmetry_residual = 0.0;  // max |d_x u_y - d_y u_x| over samples
  std::vector<std::size_t> failing_forms;
  std::vector<std::size_t> mixed_jump_forms;
  S2Verdict verdict = S2Verdict::Fails;
};

S2Report s2_membership(const PiecewiseFn& u, const SamplingOptions& opt = {});

// Mixed-field sample points used by s2_membership (line samples plus face
// representatives), exposed for property tests.
std::vector<std::vector<double>> symmetry_samples(const PiecewiseFn& u, const SamplingOptions& opt = {});

}  // namespace speculus

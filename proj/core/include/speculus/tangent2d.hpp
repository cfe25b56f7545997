#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "speculus/piecewise.hpp"

namespace speculus {

using Vec3 = std::array<double, 3>;

struct NoStrongTangent : Error {
  double residual;
  Vec3 candidate;  // (A(a1,b1), A(a2,b2), -1), reported for diagnostics
  NoStrongTangent(double r, Vec3 c)
      : Error("no strong specular tangent plane (criterion residual " + std::to_string(r) + ")"),
        residual(r),
        candidate(c) {}
};

struct SpherePoints {
  Vec3 anchor;  // (a1, a2, u[a])
  Vec3 p1, q1, p2, q2;
  double alpha1 = 0, beta1 = 0, alpha2 = 0, beta2 = 0;
};

// z = c1*x + c2*y + c0 in global coordinates.
struct Plane {
  double c1 = 0, c2 = 0, c0 = 0;
  std::size_t omitted = 0;  // 0..3 for p1, q1, p2, q2
  double at(double x, double y) const { return c1 * x + c2 * y + c0; }
};

struct TangentData {
  SpherePoints points;
  double criterion = 0.0;
  std::optional<Vec3> normal;
  Vec3 candidate_normal{};
  std::vector<Plane> planes;
  std::vector<std::size_t> degenerate;  // omitted-point indices whose triple was degenerate
};

SpherePoints sphere_points(const PiecewiseFn& u, std::span<const double> a);
double criterion_value(double a1, double b1, double a2, double b2);
double strong_criterion_residual(const PiecewiseFn& u, std::span<const double> a);
double tol_crit(double a1, double b1, double a2, double b2);
// Throws NoStrongTangent when the criterion fails.
Vec3 specular_normal(const PiecewiseFn& u, std::span<const double> a);
std::vector<Plane> weak_tangent_planes(const PiecewiseFn& u, std::span<const double> a,
                                       std::vector<std::size_t>* degenerate = nullptr);
TangentData tangent_data(const PiecewiseFn& u, std::span<const double> a);

}  // namespace speculus

#include "speculus/tangent2d.hpp"

#include <cmath>

#include "speculus/specular.hpp"

namespace speculus {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 minus(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

void require_2d(const PiecewiseFn& u, std::span<const double> a) {
  if (u.dim() != 2 || a.size() != 2) throw DimensionMismatch("tangent geometry needs a 2D function and point");
}

}  // namespace

SpherePoints sphere_points(const PiecewiseFn& u, std::span<const double> a) {
  require_2d(u, a);
  auto lx = one_sided_limits(u, a, 0);
  auto ly = one_sided_limits(u, a, 1);
  if (std::fabs(lx.mid - ly.mid) > 1e-9 * (1.0 + std::fabs(lx.mid) + std::fabs(ly.mid)))
    throw CenterMismatch("axis centers differ: " + std::to_string(lx.mid) + " vs " + std::to_string(ly.mid));
  auto sx = semi_derivatives(u, a, 0);
  auto sy = semi_derivatives(u, a, 1);
  SpherePoints s;
  s.anchor = {a[0], a[1], lx.mid};
  s.alpha1 = sx.right;
  s.beta1 = sx.left;
  s.alpha2 = sy.right;
  s.beta2 = sy.left;
  const Vec3& c = s.anchor;
  double r1 = std::sqrt(1.0 + s.alpha1 * s.alpha1), t1 = std::sqrt(1.0 + s.beta1 * s.beta1);
  double r2 = std::sqrt(1.0 + s.alpha2 * s.alpha2), t2 = std::sqrt(1.0 + s.beta2 * s.beta2);
  s.p1 = {c[0] + 1.0 / r1, c[1], c[2] + s.alpha1 / r1};
  s.q1 = {c[0] - 1.0 / t1, c[1], c[2] - s.beta1 / t1};
  s.p2 = {c[0], c[1] + 1.0 / r2, c[2] + s.alpha2 / r2};
  s.q2 = {c[0], c[1] - 1.0 / t2, c[2] - s.beta2 / t2};
  return s;
}

double criterion_value(double a1, double b1, double a2, double b2) {
  return (a1 - b1) * (std::sqrt(1.0 + a2 * a2) + std::sqrt(1.0 + b2 * b2)) -
         (a2 - b2) * (std::sqrt(1.0 + a1 * a1) + std::sqrt(1.0 + b1 * b1));
}

double tol_crit(double a1, double b1, double a2, double b2) {
  return 1e-9 * (1.0 + std::fabs(a1) + std::fabs(b1) + std::fabs(a2) + std::fabs(b2));
}

double strong_criterion_residual(const PiecewiseFn& u, std::span<const double> a) {
  auto s = sphere_points(u, a);
  return criterion_value(s.alpha1, s.beta1, s.alpha2, s.beta2);
}

namespace {

Vec3 normal_candidate(const SpherePoints& s) {
  return {a_combine(s.alpha1, s.beta1), a_combine(s.alpha2, s.beta2), -1.0};
}

std::vector<Plane> planes_from(const SpherePoints& s, bool strong, std::vector<std::size_t>* degenerate) {
  const Vec3 pts[4] = {s.p1, s.q1, s.p2, s.q2};
  std::vector<Plane> out;
  for (std::size_t o = 0; o < 4; ++o) {
    Vec3 v[3];
    std::size_t n = 0;
    for (std::size_t k = 0; k < 4; ++k)
      if (k != o) v[n++] = pts[k];
    // Solve [x y 1] c = z by Cramer's rule.
    double det = v[0][0] * (v[1][1] - v[2][1]) - v[0][1] * (v[1][0] - v[2][0]) + (v[1][0] * v[2][1] - v[2][0] * v[1][1]);
    if (std::fabs(det) <= 1e-12) {
      if (degenerate) degenerate->push_back(o);
      continue;
    }
    auto solve = [&](int col) {
      double m[3][3];
      for (int r = 0; r < 3; ++r) {
        m[r][0] = v[r][0];
        m[r][1] = v[r][1];
        m[r][2] = 1.0;
        m[r][col] = v[r][2];
      }
      return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
             det;
    };
    Plane p{solve(0), solve(1), solve(2), o};
    bool dup = false;
    for (auto& q : out) {
      double d = std::fabs(q.c1 - p.c1) + std::fabs(q.c2 - p.c2) + std::fabs(q.c0 - p.c0);
      if (d <= 1e-9 * (1.0 + std::fabs(p.c1) + std::fabs(p.c2) + std::fabs(p.c0))) dup = true;
    }
    if (strong && !out.empty()) dup = true;
    if (!dup) out.push_back(p);
  }
  return out;
}

}  // namespace

Vec3 specular_normal(const PiecewiseFn& u, std::span<const double> a) {
  auto s = sphere_points(u, a);
  double r = criterion_value(s.alpha1, s.beta1, s.alpha2, s.beta2);
  Vec3 n = normal_candidate(s);
  if (std::fabs(r) > tol_crit(s.alpha1, s.beta1, s.alpha2, s.beta2)) throw NoStrongTangent(r, n);
  Vec3 c = cross(minus(s.p1, s.q1), minus(s.p2, s.q2));
  if (norm(cross(n, c)) > 1e-9 * norm(n) * norm(c)) throw Error("specular normal is not parallel to l1 x l2");
  return n;
}

std::vector<Plane> weak_tangent_planes(const PiecewiseFn& u, std::span<const double> a,
                                       std::vector<std::size_t>* degenerate) {
  auto s = sphere_points(u, a);
  bool strong = std::fabs(criterion_value(s.alpha1, s.beta1, s.alpha2, s.beta2)) <=
                tol_crit(s.alpha1, s.beta1, s.alpha2, s.beta2);
  return planes_from(s, strong, degenerate);
}

TangentData tangent_data(const PiecewiseFn& u, std::span<const double> a) {
  TangentData t;
  t.points = sphere_points(u, a);
  const auto& s = t.points;
  t.criterion = criterion_value(s.alpha1, s.beta1, s.alpha2, s.beta2);
  t.candidate_normal = normal_candidate(s);
  bool strong = std::fabs(t.criterion) <= tol_crit(s.alpha1, s.beta1, s.alpha2, s.beta2);
  if (strong) t.normal = t.candidate_normal;
  t.planes = planes_from(s, strong, &t.degenerate);
  return t;
}

}  // namespace speculus

#include "speculus/specular.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace speculus {

double a_combine(double alpha, double beta) {
  if (alpha == beta) return alpha;
  if (alpha == -beta) return 0.0;
  double lo = std::min(alpha, beta), hi = std::max(alpha, beta);
  return std::tan(0.5 * (std::atan(lo) + std::atan(hi)));
}

namespace {

constexpr double kFdStep = 1e-6;

double shifted(const Branch& b, std::span<const double> p, std::size_t axis, double h) {
  std::vector<double> q(p.begin(), p.end());
  q[axis] += h;
  return b.value(q);
}

// Second-order one-sided difference with one Richardson step.
double one_sided_fd(const Branch& b, std::span<const double> p, std::size_t axis, int side) {
  auto D = [&](double h) {
    double s = side * h;
    return (-3.0 * b.value(p) + 4.0 * shifted(b, p, axis, s) - shifted(b, p, axis, 2 * s)) / (2.0 * s);
  };
  return (4.0 * D(kFdStep / 2) - D(kFdStep)) / 3.0;
}

double central_fd(const Branch& b, std::span<const double> p, std::size_t axis) {
  auto D = [&](double h) { return (shifted(b, p, axis, h) - shifted(b, p, axis, -h)) / (2.0 * h); };
  return (4.0 * D(kFdStep * 5) - D(kFdStep * 10)) / 3.0;
}

double derivative_at(const Branch& b, std::span<const double> p, std::size_t axis, int side, bool* numeric) {
  if (b.expr) return eval(diff(b.expr, static_cast<int>(axis)), p);
  if (numeric) *numeric = true;
  return one_sided_fd(b, p, axis, side);
}

Branch derivative_branch(const Branch& b, std::size_t axis) {
  if (b.expr) return Branch{b.pattern, diff(b.expr, static_cast<int>(axis)), {}};
  Branch src = b;
  return Branch{b.pattern, nullptr, [src, axis](std::span<const double> p) { return central_fd(src, p, axis); }};
}

}  // namespace

SemiDerivativePair semi_derivatives(const PiecewiseFn& u, std::span<const double> p, std::size_t axis) {
  if (p.size() != u.dim()) throw DimensionMismatch("point dimension does not match function");
  if (axis >= u.dim()) throw DimensionMismatch("axis out of range");
  auto s = sign_vector(u, p);
  Branch right = branch_for(u, adjacent_pattern(u, s, axis, +1));
  Branch left = branch_for(u, adjacent_pattern(u, s, axis, -1));
  SemiDerivativePair r;
  r.axis = axis;
  r.right = derivative_at(right, p, axis, +1, &r.numeric);
  r.left = derivative_at(left, p, axis, -1, &r.numeric);
  if (!std::isfinite(r.right) || !std::isfinite(r.left)) throw DomainError("non-finite semi-derivative");
  return r;
}

double specular_partial(const PiecewiseFn& u, std::span<const double> p, std::size_t axis) {
  auto s = semi_derivatives(u, p, axis);
  return a_combine(s.right, s.left);
}

PiecewiseFn specular_field(const PiecewiseFn& u, std::size_t axis, FieldInfo* info) {
  if (axis >= u.dim()) throw DimensionMismatch("axis out of range");
  PiecewiseFn F;
  F.vars = u.vars;
  F.forms = u.forms;
  F.domain = u.domain;
  F.policy.assign(u.forms.size(), LinePolicy::BranchAssigned);
  FieldInfo local;
  if (u.forms.empty()) {
    F.branches.push_back(derivative_branch(branch_for(u, {}), axis));
  } else {
    for (const Face& face : faces(u)) {
      if (face.open()) {
        Branch d = derivative_branch(branch_for(u, face.pattern), axis);
        d.pattern = face.pattern;
        F.branches.push_back(std::move(d));
        continue;
      }
      Branch dR = derivative_branch(branch_for(u, adjacent_pattern(u, face.pattern, axis, +1)), axis);
      Branch dL = derivative_branch(branch_for(u, adjacent_pattern(u, face.pattern, axis, -1)), axis);
      if (dR.expr && dL.expr && !has_variables(dR.expr) && !has_variables(dL.expr)) {
        double a = eval(dR.expr, std::span<const double>{});
        double b = eval(dL.expr, std::span<const double>{});
        F.branches.push_back(Branch{face.pattern, constant(a_combine(a, b)), {}});
        ++local.constant_rows;
      } else {
        F.branches.push_back(Branch{face.pattern, nullptr, [dR, dL](std::span<const double> p) {
                                      return a_combine(dR.value(p), dL.value(p));
                                    }});
        ++local.closure_rows;
      }
    }
  }
  if (info) *info = local;
  return F;
}

PiecewiseFn reflect(const PiecewiseFn& u, std::size_t axis) {
  PiecewiseFn v = u;
  std::vector<Expr> repl(u.dim());
  repl[axis] = neg(variable(u.vars[axis], static_cast<int>(axis)));
  for (std::size_t k = 0; k < v.forms.size(); ++k) {
    AffineForm f = u.forms[k];
    f.a[axis] = -f.a[axis];
    double scale = 1.0;
    v.forms[k] = f.normalized(&scale);
    if (scale < 0)
      for (auto& b : v.branches)
        if (b.pattern[k] != kWild) b.pattern[k] = -b.pattern[k];
  }
  for (auto& d : v.domain) d.a[axis] = -d.a[axis];
  for (auto& b : v.branches) {
    if (b.expr) {
      b.expr = substitute(b.expr, repl);
    } else {
      PointFn g = b.closure;
      b.closure = [g, axis](std::span<const double> p) {
        std::vector<double> q(p.begin(), p.end());
        q[axis] = -q[axis];
        return g(q);
      };
    }
  }
  if (v.whole) v.whole = substitute(v.whole, repl);
  return v;
}

double odd_reflection_check(const PiecewiseFn& u, std::span<const double> p, std::size_t axis) {
  PiecewiseFn v = reflect(u, axis);
  std::vector<double> q(p.begin(), p.end());
  q[axis] = -q[axis];
  return std::fabs(specular_partial(v, p, axis) + specular_partial(u, q, axis));
}

double Phototangent::operator()(double y) const {
  if (y < x) return left_slope * (y - x) + left_value;
  if (y > x) return right_slope * (y - x) + right_value;
  return center;
}

Phototangent phototangent(const PiecewiseFn& u, double x) {
  if (u.dim() != 1) throw DimensionMismatch("phototangent needs a 1D function");
  std::vector<double> p{x};
  auto lim = one_sided_limits(u, p, 0);
  auto sd = semi_derivatives(u, p, 0);
  Phototangent t;
  t.x = x;
  t.right_slope = sd.right;
  t.left_slope = sd.left;
  t.left_value = lim.left;
  t.right_value = lim.right;
  t.center = lim.mid;
  double tol = tol_jump(lim.left, lim.right);
  t.continuous = std::fabs(lim.left - lim.right) <= tol && std::fabs(lim.mid - lim.left) <= tol;
  return t;
}

bool ftc_condition_check(const PiecewiseFn& f, const SamplingOptions& opt) {
  if (f.dim() != 1) throw DimensionMismatch("FTC condition is one-dimensional");
  return is_proper(f, opt).proper;
}

namespace {

// u_i exists classically on every sampled line point: equal semi-derivatives
// and no jump along the axis. Failing forms are appended to `bad`.
bool classical_partial(const PiecewiseFn& u, std::size_t axis, const SamplingOptions& opt,
                       std::set<std::size_t>& bad) {
  bool ok = true;
  for (std::size_t k = 0; k < u.forms.size(); ++k) {
    for (auto& q : line_samples(u, k, opt)) {
      auto sd = semi_derivatives(u, q, axis);
      auto lim = one_sided_limits(u, q, axis);
      bool slope_gap = std::fabs(sd.right - sd.left) > 1e-9 * (1.0 + std::fabs(sd.right) + std::fabs(sd.left));
      bool jump = std::fabs(lim.left - lim.right) > tol_jump(lim.left, lim.right);
      if (slope_gap || jump) {
        ok = false;
        bad.insert(k);
        break;
      }
    }
  }
  return ok;
}

}  // namespace

int specular_order_1d(const PiecewiseFn& u, const SamplingOptions& opt) {
  if (u.dim() != 1) throw DimensionMismatch("specular_order_1d needs a 1D function");
  if (!is_proper(u, opt).proper) return -1;
  if (classify_continuity(u, opt).verdict != ContinuityVerdict::Continuous) return 0;
  PiecewiseFn d1 = specular_field(u, 0);
  if (!is_proper(d1, opt).proper) return 0;
  std::set<std::size_t> bad;
  if (!classical_partial(u, 0, opt, bad)) return 1;
  if (classify_continuity(d1, opt).verdict != ContinuityVerdict::Continuous) return 1;
  PiecewiseFn d2 = specular_field(d1, 0);
  return is_proper(d2, opt).proper ? 2 : 1;
}

std::string to_string(S2Verdict v) {
  switch (v) {
    case S2Verdict::S2: return "S2";
    case S2Verdict::S1Only: return "S1-only";
    case S2Verdict::S0Only: return "S0-only";
    case S2Verdict::Fails: return "fails";
  }
  return "?";
}

std::vector<std::vector<double>> symmetry_samples(const PiecewiseFn& u, const SamplingOptions& opt) {
  std::vector<std::vector<double>> pts;
  for (auto& f : faces(u)) {
    bool in_box = std::all_of(f.point.begin(), f.point.end(), [&](double v) { return std::fabs(v) <= opt.box; });
    if (in_box) pts.push_back(f.point);
  }
  for (std::size_t k = 0; k < u.forms.size(); ++k)
    for (auto& q : line_samples(u, k, opt)) pts.push_back(q);
  return pts;
}

S2Report s2_membership(const PiecewiseFn& u, const SamplingOptions& opt) {
  if (u.dim() != 2) throw DimensionMismatch("s2_membership needs a 2D function");
  S2Report rep;
  std::set<std::size_t> bad;
  auto cont = classify_continuity(u, opt);
  rep.continuous = cont.verdict == ContinuityVerdict::Continuous;
  bad.insert(cont.jump_forms.begin(), cont.jump_forms.end());
  bad.insert(cont.indeterminate_forms.begin(), cont.indeterminate_forms.end());

  PiecewiseFn first[2] = {specular_field(u, 0), specular_field(u, 1)};
  for (std::size_t i = 0; i < 2; ++i) {
    rep.classical_first[i] = classical_partial(u, i, opt, bad);
    rep.first_fields_proper[i] = is_proper(first[i], opt).proper;
  }
  PiecewiseFn second[4] = {specular_field(first[0], 0), specular_field(first[0], 1), specular_field(first[1], 0),
                           specular_field(first[1], 1)};
  for (std::size_t j = 0; j < 4; ++j) {
    auto pr = is_proper(second[j], opt);
    rep.second_fields_proper[j] = pr.proper;
    bad.insert(pr.violating_forms.begin(), pr.violating_forms.end());
  }
  std::set<std::size_t> mixed_bad;
  for (std::size_t j : {1u, 2u}) {
    auto c = classify_continuity(second[j], opt);
    mixed_bad.insert(c.jump_forms.begin(), c.jump_forms.end());
    mixed_bad.insert(c.indeterminate_forms.begin(), c.indeterminate_forms.end());
    if (c.verdict == ContinuityVerdict::NotPiecewiseContinuous) mixed_bad.insert(u.forms.size());
  }
  mixed_bad.erase(u.forms.size());
  rep.mixed_continuous = mixed_bad.empty();
  rep.mixed_jump_forms.assign(mixed_bad.begin(), mixed_bad.end());
  bad.insert(mixed_bad.begin(), mixed_bad.end());

  for (auto& p : symmetry_samples(u, opt)) {
    try {
      double d = std::fabs(evaluate(second[2], p) - evaluate(second[1], p));
      rep.symmetry_residual = std::max(rep.symmetry_residual, d);
    } catch (const BranchLookupError&) {
    }
  }
  rep.failing_forms.assign(bad.begin(), bad.end());

  bool all_second = std::all_of(std::begin(rep.second_fields_proper), std::end(rep.second_fields_proper),
                                [](bool b) { return b; });
  if (rep.continuous && rep.classical_first[0] && rep.classical_first[1] && all_second && rep.mixed_continuous &&
      rep.symmetry_residual <= 1e-9)
    rep.verdict = S2Verdict::S2;
  else if (rep.continuous && rep.first_fields_proper[0] && rep.first_fields_proper[1])
    rep.verdict = S2Verdict::S1Only;
  else if (is_proper(u, opt).proper)
    rep.verdict = S2Verdict::S0Only;
  else
    rep.verdict = S2Verdict::Fails;
  return rep;
}

}  // namespace speculus

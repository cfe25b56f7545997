#include "speculus/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "speculus/specular.hpp"

namespace speculus {

double Branch::value(std::span<const double> p) const {
  if (expr) return eval(expr, p);
  if (closure) return closure(p);
  throw BranchLookupError("empty branch");
}

bool PiecewiseFn::has_closures() const {
  return std::any_of(branches.begin(), branches.end(), [](const Branch& b) { return !b.expr; });
}

bool Face::open() const {
  return std::none_of(pattern.begin(), pattern.end(), [](int s) { return s == 0; });
}

std::vector<int> parse_pattern(const std::string& s) {
  std::vector<int> out;
  for (char c : s) {
    switch (c) {
      case '+': out.push_back(1); break;
      case '-': out.push_back(-1); break;
      case '0': out.push_back(0); break;
      case '*': out.push_back(kWild); break;
      case ' ':
      case ',': break;
      default: throw ParseError(std::string("bad sign-pattern character '") + c + "'", out.size());
    }
  }
  return out;
}

bool on_form(const AffineForm& f, std::span<const double> p) {
  double scale = std::fabs(f.b);
  double s = -f.b;
  for (std::size_t i = 0; i < f.a.size(); ++i) {
    scale += std::fabs(f.a[i] * p[i]);
    s += f.a[i] * p[i];
  }
  return std::fabs(s) <= 1e-12 * (1.0 + scale);
}

namespace {

int sign_at(const AffineForm& f, std::span<const double> p) {
  if (on_form(f, p)) return 0;
  return f.value(p) > 0 ? 1 : -1;
}

bool inside(const std::vector<AffineForm>& domain, std::span<const double> p) {
  return std::all_of(domain.begin(), domain.end(), [&](const AffineForm& f) { return sign_at(f, p) > 0; });
}

bool matches(const std::vector<int>& row, const std::vector<int>& pattern) {
  for (std::size_t k = 0; k < row.size(); ++k)
    if (row[k] != kWild && row[k] != pattern[k]) return false;
  return true;
}

}  // namespace

std::vector<int> sign_vector(const PiecewiseFn& u, std::span<const double> p) {
  std::vector<int> s(u.forms.size());
  for (std::size_t k = 0; k < u.forms.size(); ++k) s[k] = sign_at(u.forms[k], p);
  return s;
}

const Branch* find_branch(const PiecewiseFn& u, const std::vector<int>& pattern) {
  for (const auto& b : u.branches)
    if (matches(b.pattern, pattern)) return &b;
  return nullptr;
}

std::size_t combining_axis(const AffineForm& f) {
  for (std::size_t i = 0; i < f.a.size(); ++i)
    if (f.a[i] != 0.0) return i;
  return 0;
}

double proper_value(double left, double right) {
  if (std::fabs(left + right) <= kTolZero) return 0.0;
  return a_combine(left, right);
}

std::vector<int> adjacent_pattern(const PiecewiseFn& u, const std::vector<int>& pattern, std::size_t axis,
                                  int dir) {
  std::vector<int> s = pattern;
  for (std::size_t k = 0; k < s.size(); ++k) {
    double c = u.forms[k].a[axis];
    if (s[k] == 0 && c != 0.0) s[k] = dir * (c > 0 ? 1 : -1);
  }
  return s;
}

namespace {

std::string pattern_str(const std::vector<int>& s) {
  std::string r;
  for (int v : s) r += v == kWild ? '*' : (v > 0 ? '+' : (v < 0 ? '-' : '0'));
  return "(" + r + ")";
}

bool has_zero(const std::vector<int>& s) { return std::find(s.begin(), s.end(), 0) != s.end(); }

}  // namespace

double face_value(const PiecewiseFn& u, const std::vector<int>& pattern, std::span<const double> p) {
  if (!has_zero(pattern)) {
    const Branch* b = find_branch(u, pattern);
    if (!b) throw BranchLookupError("no branch for sign pattern " + pattern_str(pattern));
    return b->value(p);
  }
  bool all_assigned = true;
  for (std::size_t k = 0; k < pattern.size(); ++k)
    if (pattern[k] == 0 && u.policy[k] != LinePolicy::BranchAssigned) all_assigned = false;
  if (all_assigned) {
    const Branch* b = find_branch(u, pattern);
    if (!b) throw BranchLookupError("no branch for sign pattern " + pattern_str(pattern));
    return b->value(p);
  }
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (pattern[k] != 0 || u.policy[k] != LinePolicy::SpecularCombination) continue;
    std::size_t j = combining_axis(u.forms[k]);
    double l = face_value(u, adjacent_pattern(u, pattern, j, -1), p);
    double r = face_value(u, adjacent_pattern(u, pattern, j, +1), p);
    return proper_value(l, r);
  }
  if (u.whole) return eval(u.whole, p);
  const Branch* b = find_branch(u, pattern);
  if (!b) throw BranchLookupError("no branch for sign pattern " + pattern_str(pattern));
  return b->value(p);
}

double evaluate(const PiecewiseFn& u, std::span<const double> p) {
  if (p.size() != u.dim()) throw DimensionMismatch("point dimension does not match function");
  return face_value(u, sign_vector(u, p), p);
}

Branch branch_for(const PiecewiseFn& u, const std::vector<int>& pattern, bool* by_continuity) {
  if (by_continuity) *by_continuity = false;
  if (!has_zero(pattern)) {
    const Branch* b = find_branch(u, pattern);
    if (!b) throw BranchLookupError("no branch for sign pattern " + pattern_str(pattern));
    return *b;
  }
  if (u.whole) {
    std::vector<SignAssignment> asg;
    for (std::size_t k = 0; k < pattern.size(); ++k)
      if (pattern[k] == 1 || pattern[k] == -1) asg.push_back({u.forms[k], pattern[k]});
    return Branch{pattern, pin_signs_partial(u.whole, asg), {}};
  }
  if (const Branch* b = find_branch(u, pattern)) return *b;
  std::vector<int> s = pattern;
  for (auto& v : s)
    if (v == 0) v = 1;
  const Branch* b = find_branch(u, s);
  if (!b) throw BranchLookupError("no branch for sign pattern " + pattern_str(pattern));
  if (by_continuity) *by_continuity = true;
  return *b;
}

OneSidedLimits one_sided_limits(const PiecewiseFn& u, std::span<const double> p, std::size_t axis) {
  if (p.size() != u.dim()) throw DimensionMismatch("point dimension does not match function");
  if (axis >= u.dim()) throw DimensionMismatch("axis out of range");
  auto s = sign_vector(u, p);
  OneSidedLimits r;
  r.axis = axis;
  r.left = face_value(u, adjacent_pattern(u, s, axis, -1), p);
  r.right = face_value(u, adjacent_pattern(u, s, axis, +1), p);
  r.mid = 0.5 * (r.left + r.right);
  return r;
}

// ------------------------------------------------------------ construction

PiecewiseFn from_expression(const Expr& e, const Vars& vars) {
  PiecewiseFn u;
  u.vars = vars;
  u.whole = e;
  u.forms = affine_arguments(e, vars.size());
  u.policy.assign(u.forms.size(), LinePolicy::DirectEval);
  if (u.forms.empty()) {
    u.branches.push_back(Branch{{}, e, {}});
    return u;
  }
  for (const Face& f : enumerate_faces(u.forms, {}, vars.size())) {
    if (!f.open()) continue;
    std::vector<SignAssignment> asg;
    for (std::size_t k = 0; k < u.forms.size(); ++k) asg.push_back({u.forms[k], f.pattern[k]});
    u.branches.push_back(Branch{f.pattern, pin_signs(e, asg), {}});
  }
  return u;
}

PiecewiseFn from_expression(const std::string& text, const Vars& vars) {
  return from_expression(parse(text, vars), vars);
}

PiecewiseFn from_branches(std::vector<AffineForm> forms, std::vector<Branch> table, const Vars& vars,
                          std::vector<LinePolicy> policy, std::vector<AffineForm> domain) {
  if (vars.empty() || vars.size() > 2) throw DimensionMismatch("piecewise functions are 1D or 2D");
  PiecewiseFn u;
  u.vars = vars;
  for (auto& f : forms) {
    if (f.dim() != vars.size()) throw DimensionMismatch("form dimension does not match variables");
    double k = 1.0;
    AffineForm n = f.normalized(&k);
    if (k < 0) {
      // Flip the matching column so stored patterns stay valid.
      std::size_t col = &f - forms.data();
      for (auto& b : table)
        if (col < b.pattern.size() && b.pattern[col] != kWild) b.pattern[col] = -b.pattern[col];
    }
    f = n;
  }
  for (auto& d : domain)
    if (d.dim() != vars.size()) throw DimensionMismatch("domain form dimension does not match variables");
  for (auto& b : table) {
    if (b.pattern.empty() && !forms.empty()) b.pattern.assign(forms.size(), kWild);
    if (b.pattern.size() != forms.size()) throw DimensionMismatch("pattern length does not match form count");
    if (!b.expr && !b.closure) throw BranchLookupError("branch " + pattern_str(b.pattern) + " has no value");
  }
  if (policy.empty()) policy.assign(forms.size(), LinePolicy::BranchAssigned);
  if (policy.size() != forms.size()) throw DimensionMismatch("one line policy per form expected");
  for (auto& p : policy)
    if (p == LinePolicy::DirectEval) p = LinePolicy::BranchAssigned;
  u.forms = std::move(forms);
  u.branches = std::move(table);
  u.policy = std::move(policy);
  u.domain = std::move(domain);

  for (const Face& f : enumerate_faces(u.forms, u.domain, vars.size())) {
    bool needs_row = f.open();
    if (!needs_row) {
      needs_row = true;
      for (std::size_t k = 0; k < f.pattern.size(); ++k)
        if (f.pattern[k] == 0 && u.policy[k] == LinePolicy::SpecularCombination) needs_row = false;
    }
    if (needs_row && !find_branch(u, f.pattern))
      throw CoverageGap("no branch covers sign pattern " + pattern_str(f.pattern));
  }
  return u;
}

// ------------------------------------------------------- face enumeration

namespace {

struct Line {
  double a0, a1, b;
};

}  // namespace

std::vector<Face> enumerate_faces(const std::vector<AffineForm>& forms, const std::vector<AffineForm>& domain,
                                  std::size_t dim) {
  std::vector<AffineForm> all = forms;
  all.insert(all.end(), domain.begin(), domain.end());
  std::vector<std::vector<double>> cand;

  if (dim == 1) {
    std::vector<double> roots;
    for (auto& f : all) roots.push_back(f.b / f.a[0]);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    if (roots.empty()) {
      cand.push_back({0.0});
    } else {
      double span = std::max(1.0, roots.back() - roots.front());
      cand.push_back({roots.front() - span});
      for (std::size_t i = 0; i < roots.size(); ++i) {
        cand.push_back({roots[i]});
        if (i + 1 < roots.size()) cand.push_back({0.5 * (roots[i] + roots[i + 1])});
      }
      cand.push_back({roots.back() + span});
    }
  } else {
    std::vector<Line> L;
    for (auto& f : all) L.push_back({f.a[0], f.a[1], f.b});
    if (L.empty()) cand.push_back({0.0, 0.0});
    for (std::size_t i = 0; i < L.size(); ++i) {
      double n = std::hypot(L[i].a0, L[i].a1);
      double p0[2] = {L[i].a0 * L[i].b / (n * n), L[i].a1 * L[i].b / (n * n)};
      double dir[2] = {-L[i].a1 / n, L[i].a0 / n};
      std::vector<double> params;
      for (std::size_t j = 0; j < L.size(); ++j) {
        if (j == i) continue;
        double det = L[i].a0 * L[j].a1 - L[i].a1 * L[j].a0;
        if (std::fabs(det) <= 1e-14 * n * std::hypot(L[j].a0, L[j].a1)) continue;
        double x = (L[i].b * L[j].a1 - L[i].a1 * L[j].b) / det;
        double y = (L[i].a0 * L[j].b - L[i].b * L[j].a0) / det;
        cand.push_back({x, y});
        params.push_back((x - p0[0]) * dir[0] + (y - p0[1]) * dir[1]);
      }
      std::sort(params.begin(), params.end());
      params.erase(std::unique(params.begin(), params.end()), params.end());
      std::vector<double> edge;
      if (params.empty()) {
        edge.push_back(0.0);
      } else {
        double span = std::max(1.0, params.back() - params.front());
        edge.push_back(params.front() - span);
        for (std::size_t k = 0; k + 1 < params.size(); ++k) edge.push_back(0.5 * (params[k] + params[k + 1]));
        edge.push_back(params.back() + span);
      }
      for (double s : edge) {
        double q[2] = {p0[0] + s * dir[0], p0[1] + s * dir[1]};
        cand.push_back({q[0], q[1]});
        double eps = 1.0;
        for (std::size_t j = 0; j < L.size(); ++j) {
          if (j == i) continue;
          double nj = std::hypot(L[j].a0, L[j].a1);
          double dist = std::fabs(L[j].a0 * q[0] + L[j].a1 * q[1] - L[j].b) / nj;
          if (dist > 1e-12 * (1.0 + std::fabs(q[0]) + std::fabs(q[1]))) eps = std::min(eps, 0.5 * dist);
        }
        cand.push_back({q[0] + eps * L[i].a0 / n, q[1] + eps * L[i].a1 / n});
        cand.push_back({q[0] - eps * L[i].a0 / n, q[1] - eps * L[i].a1 / n});
      }
    }
  }

  std::map<std::vector<int>, std::pair<std::vector<double>, std::size_t>> acc;
  for (auto& c : cand) {
    if (!inside(domain, c)) continue;
    std::vector<int> s(forms.size());
    for (std::size_t k = 0; k < forms.size(); ++k) s[k] = sign_at(forms[k], c);
    auto [it, fresh] = acc.try_emplace(s, std::vector<double>(dim, 0.0), 0);
    for (std::size_t i = 0; i < dim; ++i) it->second.first[i] += c[i];
    ++it->second.second;
  }
  std::vector<Face> out;
  for (auto& [pattern, sum] : acc) {
    Face f{pattern, sum.first};
    for (auto& v : f.point) v /= static_cast<double>(sum.second);
    out.push_back(std::move(f));
  }
  // +1 before 0 before -1, column by column
  std::sort(out.begin(), out.end(), [](const Face& x, const Face& y) {
    return std::lexicographical_compare(x.pattern.begin(), x.pattern.end(), y.pattern.begin(), y.pattern.end(),
                                        [](int a, int b) { return a > b; });
  });
  return out;
}

std::vector<Face> faces(const PiecewiseFn& u) { return enumerate_faces(u.forms, u.domain, u.dim()); }

// ---------------------------------------------------------------- sampling

namespace {

double radical_inverse2(std::size_t n) {
  double r = 0.0, f = 0.5;
  while (n) {
    if (n & 1u) r += f;
    n >>= 1u;
    f *= 0.5;
  }
  return r;
}

}  // namespace

std::vector<std::vector<double>> line_samples(const PiecewiseFn& u, std::size_t k, const SamplingOptions& opt) {
  const AffineForm& f = u.forms[k];
  std::vector<std::vector<double>> out;
  if (u.dim() == 1) {
    std::vector<double> r{f.b / f.a[0]};
    if (std::fabs(r[0]) <= opt.box && inside(u.domain, r)) out.push_back(r);
    return out;
  }
  double n = std::hypot(f.a[0], f.a[1]);
  double p0[2] = {f.a[0] * f.b / (n * n), f.a[1] * f.b / (n * n)};
  double dir[2] = {-f.a[1] / n, f.a[0] / n};
  double lo = -1e300, hi = 1e300;
  for (int c = 0; c < 2; ++c) {
    if (dir[c] == 0.0) {
      if (std::fabs(p0[c]) > opt.box) return out;
      continue;
    }
    double s1 = (-opt.box - p0[c]) / dir[c], s2 = (opt.box - p0[c]) / dir[c];
    lo = std::max(lo, std::min(s1, s2));
    hi = std::min(hi, std::max(s1, s2));
  }
  if (!(hi > lo)) return out;
  std::vector<double> cuts;
  std::vector<AffineForm> others;
  for (std::size_t j = 0; j < u.forms.size(); ++j)
    if (j != k) others.push_back(u.forms[j]);
  others.insert(others.end(), u.domain.begin(), u.domain.end());
  for (auto& g : others) {
    double rate = g.a[0] * dir[0] + g.a[1] * dir[1];
    if (std::fabs(rate) <= 1e-14 * std::hypot(g.a[0], g.a[1])) continue;
    cuts.push_back((g.b - g.a[0] * p0[0] - g.a[1] * p0[1]) / rate);
  }
  for (std::size_t i = 1; out.size() < opt.per_form && i < 64 * opt.per_form; ++i) {
    double s = lo + (hi - lo) * radical_inverse2(i);
    bool near = std::any_of(cuts.begin(), cuts.end(), [&](double c) { return std::fabs(s - c) < opt.delta; });
    if (near) continue;
    std::vector<double> q{p0[0] + s * dir[0], p0[1] + s * dir[1]};
    if (!inside(u.domain, q)) continue;
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------- reports

ContinuityReport classify_continuity(const PiecewiseFn& u, const SamplingOptions& opt) {
  ContinuityReport rep;
  bool restrictions_ok = true;
  for (std::size_t k = 0; k < u.forms.size(); ++k) {
    FormContinuity fc;
    fc.form = k;
    std::size_t j = combining_axis(u.forms[k]);
    double n = u.dim() == 2 ? std::hypot(u.forms[k].a[0], u.forms[k].a[1]) : 1.0;
    for (auto& q : line_samples(u, k, opt)) {
      ++fc.samples;
      auto lim = one_sided_limits(u, q, j);
      double gap = std::fabs(lim.left - lim.right);
      fc.max_gap = std::max(fc.max_gap, gap);
      if (gap > tol_jump(lim.left, lim.right)) ++fc.jumps;
      if (u.dim() == 2) {
        double eta = opt.delta / 10.0;
        double dir[2] = {-u.forms[k].a[1] / n, u.forms[k].a[0] / n};
        double v0 = evaluate(u, q);
        for (int sgn : {-1, 1}) {
          std::vector<double> r{q[0] + sgn * eta * dir[0], q[1] + sgn * eta * dir[1]};
          double v = evaluate(u, r);
          if (std::fabs(v - v0) > 1e-5 * (1.0 + std::fabs(v0))) fc.restriction_continuous = false;
        }
      }
    }
    if (fc.samples > 0 && fc.jumps == fc.samples) rep.jump_forms.push_back(k);
    else if (fc.jumps > 0) rep.indeterminate_forms.push_back(k);
    restrictions_ok = restrictions_ok && fc.restriction_continuous;
    rep.per_form.push_back(fc);
  }
  if (!restrictions_ok) rep.verdict = ContinuityVerdict::NotPiecewiseContinuous;
  else if (rep.jump_forms.empty() && rep.indeterminate_forms.empty()) rep.verdict = ContinuityVerdict::Continuous;
  else rep.verdict = ContinuityVerdict::PiecewiseContinuous;
  return rep;
}

ProperReport is_proper(const PiecewiseFn& u, const SamplingOptions& opt) {
  ProperReport rep;
  rep.continuity = classify_continuity(u, opt);
  bool ok = rep.continuity.verdict != ContinuityVerdict::NotPiecewiseContinuous;
  for (std::size_t k = 0; k < u.forms.size(); ++k) {
    bool form_bad = false;
    std::size_t j = combining_axis(u.forms[k]);
    for (auto& q : line_samples(u, k, opt)) {
      ++rep.checked_points;
      double val = evaluate(u, q);
      bool primary_ok = true, other_bad = false;
      for (std::size_t i = 0; i < u.dim(); ++i) {
        auto lim = one_sided_limits(u, q, i);
        double expected = proper_value(lim.left, lim.right);
        double viol = std::fabs(val - expected);
        rep.max_violation = std::max(rep.max_violation, viol);
        if (viol > 1e-9 * (1.0 + std::fabs(expected))) {
          form_bad = true;
          if (i == j) primary_ok = false;
          else other_bad = true;
        }
      }
      if (primary_ok && other_bad) rep.axis_disagreement = true;
    }
    if (form_bad) rep.violating_forms.push_back(k);
  }
  rep.proper = ok && rep.violating_forms.empty();
  return rep;
}

}  // namespace speculus

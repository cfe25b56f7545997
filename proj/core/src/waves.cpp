#include "speculus/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "speculus/quad.hpp"
#include "speculus/tangent2d.hpp"

namespace speculus {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Transport: return "transport";
    case Provenance::DAlembert: return "dalembert";
    case Provenance::HalfLine: return "halfline";
    case Provenance::Duhamel: return "duhamel";
  }
  return "?";
}

namespace {

const Vars kXT{"x", "t"};
constexpr double kInf = std::numeric_limits<double>::infinity();

AffineForm form2(double ax, double at, double b) { return AffineForm{{ax, at}, b}; }

bool is_zero_fn(const PiecewiseFn& u) {
  return std::all_of(u.branches.begin(), u.branches.end(), [](const Branch& b) {
    return b.expr && b.expr->op == Op::Const && b.expr->value == 0.0;
  });
}

struct Term {
  double coef;
  const PiecewiseFn* fn;
};

std::size_t add_form(std::vector<AffineForm>& forms, const AffineForm& f) {
  for (std::size_t i = 0; i < forms.size(); ++i)
    if (forms[i].same_as(f)) return i;
  forms.push_back(f);
  return forms.size() - 1;
}

// Sum of terms over the union arrangement. With a selector form, case 0 applies
// where it is positive and case 1 where it is negative. Rows are built for the
// open faces inside `face_domain`; on-line values use the specular combination.
PiecewiseFn assemble(const std::vector<std::vector<Term>>& cases, const AffineForm* selector,
                     const std::vector<AffineForm>& face_domain, std::vector<AffineForm> domain) {
  std::vector<AffineForm> forms;
  if (selector) forms.push_back(selector->normalized());
  std::vector<std::vector<std::vector<std::size_t>>> index(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c)
    for (const Term& t : cases[c]) {
      std::vector<std::size_t> idx;
      for (const auto& f : t.fn->forms) idx.push_back(add_form(forms, f));
      index[c].push_back(std::move(idx));
    }

  PiecewiseFn u;
  u.vars = kXT;
  u.forms = forms;
  u.policy.assign(forms.size(), LinePolicy::SpecularCombination);
  u.domain = std::move(domain);

  for (const Face& face : enumerate_faces(forms, face_domain, 2)) {
    if (!face.open()) continue;
    std::size_t c = (selector && face.pattern[0] < 0) ? 1 : 0;
    std::vector<std::pair<double, Branch>> parts;
    for (std::size_t k = 0; k < cases[c].size(); ++k) {
      const Term& t = cases[c][k];
      std::vector<int> sub;
      for (std::size_t j : index[c][k]) sub.push_back(face.pattern[j]);
      parts.emplace_back(t.coef, branch_for(*t.fn, sub));
    }
    bool symbolic = std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.second.symbolic(); });
    Branch row;
    row.pattern = face.pattern;
    if (symbolic) {
      Expr e;
      for (auto& [coef, b] : parts) {
        Expr piece = coef == 1.0 ? b.expr : mul(constant(coef), b.expr);
        e = e ? add(e, piece) : piece;
      }
      row.expr = e ? e : constant(0.0);
    } else {
      row.closure = [parts](std::span<const double> p) {
        double s = 0.0;
        for (const auto& [coef, b] : parts) s += coef * b.value(p);
        return s;
      };
    }
    u.branches.push_back(std::move(row));
  }
  return u;
}

std::vector<std::size_t> characteristic_indices(const PiecewiseFn& u) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < u.forms.size(); ++k) {
    const auto& a = u.forms[k].a;
    if (a[0] == 1.0 && std::fabs(a[1]) == 1.0) out.push_back(k);
  }
  return out;
}

double at1(const PiecewiseFn& u, double x) {
  const double p[1] = {x};
  return evaluate(u, p);
}

void require_1d(const PiecewiseFn& u, const char* name) {
  if (u.dim() != 1) throw DimensionMismatch(std::string(name) + " must be a function of one variable");
}

void check_wave_data(const PiecewiseFn& phi, const PiecewiseFn& psi) {
  require_1d(phi, "phi");
  require_1d(psi, "psi");
  if (specular_order_1d(phi) < 2) throw SolverPrecondition("phi is not in the second specular class");
  if (specular_order_1d(psi) < 1) throw SolverPrecondition("psi is not a proper first-class function");
}

// --------------------------------------------------------- Duhamel folding

// c_xx x^2 + c_xt x t + c_tt t^2 + c_x x + c_t t + c
struct Quad {
  double xx = 0, xt = 0, tt = 0, x = 0, t = 0, c = 0;
};

struct Lin {
  double x = 0, t = 0, c = 0;
  double at(double px, double pt) const { return x * px + t * pt + c; }
};

Lin operator-(const Lin& a, const Lin& b) { return {a.x - b.x, a.t - b.t, a.c - b.c}; }

Quad operator*(const Lin& a, const Lin& b) {
  return {a.x * b.x, a.x * b.t + a.t * b.x, a.t * b.t, a.x * b.c + a.c * b.x, a.t * b.c + a.c * b.t, a.c * b.c};
}

Quad& operator+=(Quad& q, const Quad& r) {
  q.xx += r.xx;
  q.xt += r.xt;
  q.tt += r.tt;
  q.x += r.x;
  q.t += r.t;
  q.c += r.c;
  return q;
}

Quad scaled(Quad q, double s) {
  q.xx *= s;
  q.xt *= s;
  q.tt *= s;
  q.x *= s;
  q.t *= s;
  q.c *= s;
  return q;
}

Expr to_expr(const Quad& q) {
  Expr x = variable("x", 0), t = variable("t", 1);
  std::pair<double, Expr> terms[] = {{q.xx, pow_int(x, 2)}, {q.xt, mul(x, t)}, {q.tt, pow_int(t, 2)},
                                     {q.x, x},              {q.t, t},          {q.c, nullptr}};
  Expr e;
  for (auto& [c, m] : terms) {
    if (c == 0.0) continue;
    Expr piece = !m ? constant(c) : (c == 1.0 ? m : mul(constant(c), m));
    e = e ? add(e, piece) : piece;
  }
  return e ? e : constant(0.0);
}

// Bound that is either a constant (possibly infinite) or an apex coordinate.
struct Bound {
  Lin lin;
  double value;  // numeric value at the current apex
};

Bound constant_bound(double c) { return {{0, 0, std::isfinite(c) ? c : 0.0}, c}; }

// Area of {a <= xi <= A, B <= eta <= b, xi <= eta} as a quadratic in the apex.
// Orderings are decided numerically; they are fixed on each apex face.
Quad area(const Bound& a, const Bound& A, const Bound& B, const Bound& b) {
  if (!(A.value > a.value) || !(b.value > B.value)) return {};
  auto clamp = [&](const Bound& v) -> const Bound& {
    if (v.value <= a.value) return a;
    if (v.value >= A.value) return A;
    return v;
  };
  const Bound& m1 = clamp(B);
  const Bound& m2 = clamp(b);
  Quad q;
  if (std::isfinite(B.value)) q += (b.lin - B.lin) * (m1.lin - a.lin);
  q += b.lin * (m2.lin - m1.lin);
  q += scaled(m2.lin * m2.lin, -0.5);
  q += scaled(m1.lin * m1.lin, 0.5);
  return q;
}

double interior(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo + 1.0;
  if (std::isfinite(hi)) return hi - 1.0;
  return 0.0;
}

}  // namespace

// ------------------------------------------------------------ composition

PiecewiseFn compose(const PiecewiseFn& h, double cx, double ct) {
  require_1d(h, "composed function");
  PiecewiseFn u;
  u.vars = kXT;
  std::vector<Expr> repl{to_expr(AffineForm{{cx, ct}, 0.0}, kXT)};
  std::vector<bool> flip;
  for (const auto& f : h.forms) {
    double k = 1.0;
    u.forms.push_back(form2(f.a[0] * cx, f.a[0] * ct, f.b).normalized(&k));
    flip.push_back(k < 0);
  }
  u.policy = h.policy;
  for (const auto& b : h.branches) {
    Branch nb;
    nb.pattern = b.pattern;
    for (std::size_t k = 0; k < nb.pattern.size(); ++k)
      if (flip[k] && nb.pattern[k] != kWild) nb.pattern[k] = -nb.pattern[k];
    if (b.expr) {
      nb.expr = substitute(b.expr, repl);
    } else {
      nb.closure = [g = b.closure, cx, ct](std::span<const double> p) {
        const double s = cx * p[0] + ct * p[1];
        return g(std::span<const double>(&s, 1));
      };
    }
    u.branches.push_back(std::move(nb));
  }
  if (h.whole) u.whole = substitute(h.whole, repl);
  return u;
}

PiecewiseFn antiderivative_fn(const PiecewiseFn& psi) {
  require_1d(psi, "psi");
  std::vector<Face> open;
  for (auto& f : enumerate_faces(psi.forms, {}, 1))
    if (f.open()) open.push_back(f);
  std::sort(open.begin(), open.end(), [](const Face& a, const Face& b) { return a.point[0] < b.point[0]; });
  std::vector<double> roots;
  for (const auto& f : psi.forms) roots.push_back(f.b / f.a[0]);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

  auto shared = std::make_shared<const PiecewiseFn>(psi);
  auto global = [shared](double s) { return integrate_1d(*shared, 0.0, s); };

  // Per piece: symbolic P_i + C_i, or the global quadrature integral.
  const std::size_t n = open.size();
  std::vector<Expr> P(n);
  std::vector<Branch> rows(n);
  std::vector<double> C(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Branch b = branch_for(psi, open[i].pattern);
    rows[i].pattern = open[i].pattern;
    if (b.expr) {
      if (auto F = antiderivative(b.expr, 0)) {
        P[i] = *F;
      } else {
        auto fn = std::make_shared<UnaryFn>(UnaryFn{"Psi", global, b.expr});
        rows[i].expr = speculus::apply(fn, variable(psi.vars[0], 0));
      }
    } else {
      rows[i].closure = [global](std::span<const double> p) { return global(p[0]); };
    }
  }
  auto value = [&](std::size_t i, double s) {
    if (P[i]) return eval(P[i], std::span<const double>(&s, 1)) + C[i];
    return global(s);
  };
  // Piece i spans (roots[i-1], roots[i]).
  std::size_t z = 0;
  while (z < roots.size() && roots[z] < 0.0) ++z;
  if (P[z]) C[z] = -value(z, 0.0);
  for (std::size_t i = z + 1; i < n; ++i)
    if (P[i]) {
      double r = roots[i - 1];
      C[i] = value(i - 1, r) - eval(P[i], std::span<const double>(&r, 1));
    }
  for (std::size_t i = z; i-- > 0;)
    if (P[i]) {
      double r = roots[i];
      C[i] = value(i + 1, r) - eval(P[i], std::span<const double>(&r, 1));
    }
  for (std::size_t i = 0; i < n; ++i)
    if (P[i]) rows[i].expr = C[i] == 0.0 ? P[i] : add(P[i], constant(C[i]));

  PiecewiseFn out;
  out.vars = psi.vars;
  out.forms = psi.forms;
  out.policy.assign(psi.forms.size(), LinePolicy::SpecularCombination);
  out.branches = std::move(rows);
  return out;
}

PiecewiseFn duhamel_term(const PiecewiseFn& f, bool* symbolic) {
  if (f.dim() != 2) throw DimensionMismatch("forcing must be a function of (x, t)");
  const std::vector<AffineForm> upper{form2(0, 1, 0)};
  std::vector<double> xis, etas;
  bool foldable = true;
  for (const auto& g : f.forms) {
    if (g.a[0] == 1.0 && g.a[1] == -1.0) xis.push_back(g.b);
    else if (g.a[0] == 1.0 && g.a[1] == 1.0) etas.push_back(g.b);
    else foldable = false;
  }
  if (foldable)
    for (const Face& face : enumerate_faces(f.forms, upper, 2)) {
      if (!face.open()) continue;
      Branch b = branch_for(f, face.pattern);
      if (!b.expr || has_variables(b.expr)) foldable = false;
    }
  for (auto* v : {&xis, &etas}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }

  // Apex forms: every break on either characteristic family.
  std::vector<AffineForm> forms;
  for (double d : xis) {
    add_form(forms, form2(1, -1, d));
    add_form(forms, form2(1, 1, d));
  }
  for (double c : etas) {
    add_form(forms, form2(1, 1, c));
    add_form(forms, form2(1, -1, c));
  }

  PiecewiseFn D;
  D.vars = kXT;
  D.forms = forms;
  D.policy.assign(forms.size(), LinePolicy::SpecularCombination);
  D.domain = upper;
  if (symbolic) *symbolic = foldable;

  if (!foldable) {
    auto fs = std::make_shared<const PiecewiseFn>(f);
    PointFn term = [fs](std::span<const double> p) { return 0.5 * integrate_triangle(*fs, p[0], p[1]); };
    for (const Face& face : enumerate_faces(forms, upper, 2))
      if (face.open()) D.branches.push_back(Branch{face.pattern, nullptr, term});
    return D;
  }

  std::vector<double> xb{-kInf}, eb{-kInf};
  xb.insert(xb.end(), xis.begin(), xis.end());
  eb.insert(eb.end(), etas.begin(), etas.end());
  xb.push_back(kInf);
  eb.push_back(kInf);

  // Cell values of f in characteristic coordinates xi = y - s, eta = y + s.
  struct Cell {
    double lxi, uxi, leta, ueta, value;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < xb.size(); ++i)
    for (std::size_t j = 0; j + 1 < eb.size(); ++j) {
      double lxi = xb[i], uxi = xb[i + 1], leta = eb[j], ueta = eb[j + 1];
      if (!(ueta > lxi)) continue;  // no part with s > 0
      double xi = interior(lxi, std::min(uxi, ueta));
      double eta = interior(std::max(leta, xi), ueta);
      const double p[2] = {0.5 * (xi + eta), 0.5 * (eta - xi)};
      double v = evaluate(f, p);
      if (v != 0.0) cells.push_back({lxi, uxi, leta, ueta, v});
    }

  for (const Face& face : enumerate_faces(forms, upper, 2)) {
    if (!face.open()) continue;
    double px = face.point[0], pt = face.point[1];
    Bound xi0{{1, -1, 0}, px - pt}, eta0{{1, 1, 0}, px + pt};
    Quad total;
    for (const Cell& c : cells) {
      Bound lo = xi0.value >= c.lxi ? xi0 : constant_bound(c.lxi);
      Bound hi = eta0.value <= c.ueta ? eta0 : constant_bound(c.ueta);
      total += scaled(area(lo, constant_bound(c.uxi), constant_bound(c.leta), hi), 0.25 * c.value);
    }
    D.branches.push_back(Branch{face.pattern, to_expr(total), {}});
  }
  if (D.branches.empty()) D.branches.push_back(Branch{{}, constant(0.0), {}});
  return D;
}

// --------------------------------------------------------------- solvers

SolutionField solve_transport(const PiecewiseFn& h) {
  require_1d(h, "h");
  auto cont = classify_continuity(h);
  if (cont.verdict != ContinuityVerdict::Continuous) {
    std::string where;
    for (auto k : cont.jump_forms) where += " " + h.forms[k].str(h.vars);
    for (auto k : cont.indeterminate_forms) where += " " + h.forms[k].str(h.vars);
    throw SolverPrecondition("h is not specularly differentiable; jumps at" + where);
  }
  PiecewiseFn g = compose(h, 1, -1);
  SolutionField s;
  s.u = assemble({{{1.0, &g}}}, nullptr, {}, {});
  s.provenance = Provenance::Transport;
  s.characteristics = characteristic_indices(s.u);
  return s;
}

namespace {

struct DAlembertParts {
  PiecewiseFn phi_p, phi_m, Psi_p, Psi_m;
  explicit DAlembertParts(const PiecewiseFn& phi, const PiecewiseFn& psi) {
    PiecewiseFn Psi = antiderivative_fn(psi);
    phi_p = compose(phi, 1, 1);
    phi_m = compose(phi, 1, -1);
    Psi_p = compose(Psi, 1, 1);
    Psi_m = compose(Psi, 1, -1);
  }
  std::vector<Term> terms() const { return {{0.5, &phi_p}, {0.5, &phi_m}, {0.5, &Psi_p}, {-0.5, &Psi_m}}; }
};

}  // namespace

SolutionField solve_wave_homogeneous(const PiecewiseFn& phi, const PiecewiseFn& psi) {
  check_wave_data(phi, psi);
  DAlembertParts parts(phi, psi);
  SolutionField s;
  s.u = assemble({parts.terms()}, nullptr, {}, {});
  s.provenance = Provenance::DAlembert;
  s.characteristics = characteristic_indices(s.u);
  return s;
}

SolutionField solve_wave_halfline(const PiecewiseFn& phi, const PiecewiseFn& psi) {
  require_1d(phi, "phi");
  require_1d(psi, "psi");
  double p0 = at1(phi, 0.0), q0 = at1(psi, 0.0);
  if (std::fabs(p0) > 1e-12) throw SolverPrecondition("half-line compatibility: phi(0) = " + std::to_string(p0));
  if (std::fabs(q0) > 1e-12) throw SolverPrecondition("half-line compatibility: psi(0) = " + std::to_string(q0));
  check_wave_data(phi, psi);
  DAlembertParts parts(phi, psi);
  PiecewiseFn Psi = antiderivative_fn(psi);
  PiecewiseFn phi_r = compose(phi, -1, 1);
  PiecewiseFn Psi_r = compose(Psi, -1, 1);
  std::vector<Term> reflected{{0.5, &parts.phi_p}, {-0.5, &phi_r}, {0.5, &parts.Psi_p}, {-0.5, &Psi_r}};
  AffineForm selector = form2(1, -1, 0);
  SolutionField s;
  // Rows cover the whole plane (odd extension for x < 0); checks use x, t > 0.
  s.u = assemble({parts.terms(), reflected}, &selector, {}, {form2(1, 0, 0), form2(0, 1, 0)});
  s.provenance = Provenance::HalfLine;
  s.characteristics = characteristic_indices(s.u);
  return s;
}

SolutionField solve_wave_nonhomogeneous(const PiecewiseFn& phi, const PiecewiseFn& psi, const PiecewiseFn& f) {
  check_wave_data(phi, psi);
  if (f.dim() != 2) throw DimensionMismatch("forcing must be a function of (x, t)");
  if (!is_proper(f).proper) throw SolverPrecondition("forcing f is not proper");
  DAlembertParts parts(phi, psi);
  SolutionField s;
  s.duhamel = duhamel_term(f, &s.duhamel_symbolic);
  auto terms = parts.terms();
  if (!is_zero_fn(*s.duhamel)) terms.push_back({1.0, &*s.duhamel});
  const std::vector<AffineForm> upper{form2(0, 1, 0)};
  s.u = assemble({terms}, nullptr, upper, upper);
  s.provenance = Provenance::Duhamel;
  s.characteristics = characteristic_indices(s.u);
  return s;
}

// ---------------------------------------------------------- verification

double one_sided_partial(const PiecewiseFn& u, std::span<const double> p, std::size_t axis, int side) {
  Branch b = branch_for(u, adjacent_pattern(u, sign_vector(u, p), axis, side));
  if (b.expr) return eval(diff(b.expr, static_cast<int>(axis)), p);
  const double h = side * 1e-6;
  std::vector<double> q1(p.begin(), p.end()), q2 = q1;
  q1[axis] += h;
  q2[axis] += 2 * h;
  return (-3.0 * b.value(p) + 4.0 * b.value(q1) - b.value(q2)) / (2.0 * h);
}

double guarded_partial(const PiecewiseFn& u, std::span<const double> p, std::size_t axis) {
  try {
    return specular_partial(u, p, axis);
  } catch (const BranchLookupError&) {
  }
  try {
    return one_sided_partial(u, p, axis, +1);
  } catch (const BranchLookupError&) {
  }
  return one_sided_partial(u, p, axis, -1);
}

double initial_velocity(const PiecewiseFn& u, double x) {
  const double p[2] = {x, 0.0};
  return one_sided_partial(u, p, 1, +1);
}

std::vector<std::vector<double>> residual_points(const PiecewiseFn& u, const SamplingOptions& opt) {
  std::vector<std::vector<double>> pts;
  for (const Face& f : faces(u)) {
    bool in_box = std::all_of(f.point.begin(), f.point.end(), [&](double v) { return std::fabs(v) <= opt.box; });
    if (in_box) pts.push_back(f.point);
  }
  for (std::size_t k = 0; k < u.forms.size(); ++k)
    for (auto& q : line_samples(u, k, opt)) pts.push_back(std::move(q));
  return pts;
}

namespace {

// Classical u_tt - u_xx on one branch. Closures use one-sided differences
// toward `side` along `axis` (central when side = 0).
class Operator {
 public:
  double operator()(const Branch& b, std::span<const double> p, std::size_t axis, int side) {
    if (b.expr) {
      auto it = cache_.find(b.expr.get());
      if (it == cache_.end()) {
        Expr uxx = diff(diff(b.expr, 0), 0), utt = diff(diff(b.expr, 1), 1);
        it = cache_.emplace(b.expr.get(), std::make_pair(b.expr, std::make_pair(uxx, utt))).first;
      }
      const auto& [uxx, utt] = it->second.second;
      return eval(utt, p) - eval(uxx, p);
    }
    return second(b, p, 1, axis, side) - second(b, p, 0, axis, side);
  }

 private:
  static double second(const Branch& b, std::span<const double> p, std::size_t dir, std::size_t axis, int side) {
    const double h = 1e-4;
    double off[2] = {0, 0};
    if (side != 0) off[axis] = side * 4 * h;  // move into the adjacent face first
    auto at = [&](double s) {
      double q[2] = {p[0] + off[0], p[1] + off[1]};
      q[dir] += s;
      return b.value(q);
    };
    return (at(h) - 2 * at(0) + at(-h)) / (h * h);
  }

  std::map<const Node*, std::pair<Expr, std::pair<Expr, Expr>>> cache_;
};

}  // namespace

ResidualReport wave_residual(const PiecewiseFn& u, const PiecewiseFn* f, const std::vector<std::vector<double>>& points) {
  if (u.dim() != 2) throw DimensionMismatch("wave_residual needs a function of (x, t)");
  ResidualReport rep;
  PiecewiseFn Fx = specular_field(u, 0), Ft = specular_field(u, 1);
  Operator op;
  for (const auto& p : points) {
    ResidualSample s;
    s.point = p;
    s.forcing = f ? evaluate(*f, p) : 0.0;
    auto sv = sign_vector(u, p);
    auto zero = std::find(sv.begin(), sv.end(), 0);
    s.on_line = zero != sv.end();
    double value;
    if (!s.on_line) {
      value = op(branch_for(u, sv), p, 0, 0);
    } else {
      std::size_t j = combining_axis(u.forms[zero - sv.begin()]);
      double l = op(branch_for(u, adjacent_pattern(u, sv, j, -1)), p, j, -1);
      double r = op(branch_for(u, adjacent_pattern(u, sv, j, +1)), p, j, +1);
      value = proper_value(l, r);
    }
    s.residual = value - s.forcing;
    s.dxx = guarded_partial(Fx, p, 0);
    s.dtt = guarded_partial(Ft, p, 1);
    s.literal = s.dtt - s.dxx - s.forcing;
    rep.max_residual = std::max(rep.max_residual, std::fabs(s.residual));
    rep.max_literal = std::max(rep.max_literal, std::fabs(s.literal));
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

ResidualReport wave_residual(const SolutionField& u, const PiecewiseFn* f,
                             const std::vector<std::vector<double>>& points) {
  return wave_residual(u.u, f, points);
}

ResidualReport transport_residual(const PiecewiseFn& u, const std::vector<std::vector<double>>& points) {
  ResidualReport rep;
  for (const auto& p : points) {
    ResidualSample s;
    s.point = p;
    auto sv = sign_vector(u, p);
    s.on_line = std::find(sv.begin(), sv.end(), 0) != sv.end();
    s.residual = guarded_partial(u, p, 1) + guarded_partial(u, p, 0);
    s.literal = s.residual;
    rep.max_residual = std::max(rep.max_residual, std::fabs(s.residual));
    rep.max_literal = rep.max_residual;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

PiecewiseFn hypothesis_field(const PiecewiseFn& u) {
  PiecewiseFn Fx = specular_field(u, 0), Ft = specular_field(u, 1);
  PiecewiseFn v;
  v.vars = u.vars;
  v.forms = u.forms;
  v.domain = u.domain;
  v.policy.assign(u.forms.size(), LinePolicy::BranchAssigned);
  for (std::size_t i = 0; i < Ft.branches.size(); ++i) {
    const Branch& bt = Ft.branches[i];
    const Branch& bx = Fx.branches[i];
    if (bt.expr && bx.expr) {
      v.branches.push_back(Branch{bt.pattern, sub(bt.expr, bx.expr), {}});
    } else {
      v.branches.push_back(Branch{bt.pattern, nullptr, [bt, bx](std::span<const double> p) {
                                    return bt.value(p) - bx.value(p);
                                  }});
    }
  }
  return v;
}

HypothesisReport hypothesis_h_check(const SolutionField& u, const std::vector<std::vector<double>>& points) {
  HypothesisReport rep;
  PiecewiseFn v = hypothesis_field(u.u);
  for (const auto& p : points) {
    auto sv = sign_vector(v, p);
    if (std::find(sv.begin(), sv.end(), 0) == sv.end()) continue;
    HypothesisSample s;
    s.point = p;
    try {
      auto sp = sphere_points(v, p);
      s.residual = criterion_value(sp.alpha1, sp.beta1, sp.alpha2, sp.beta2);
      s.ok = std::fabs(s.residual) <= tol_crit(sp.alpha1, sp.beta1, sp.alpha2, sp.beta2);
      if (!s.ok) s.note = "criterion residual exceeds tolerance";
    } catch (const Error& e) {
      s.ok = false;
      s.note = e.what();
    }
    if (!s.ok) ++rep.failures;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

}  // namespace speculus

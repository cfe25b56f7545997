#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "speculus/tangent2d.hpp"

namespace speculus::cli {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SolverPrecondition*>(&e)) return kPrecondition;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const NonAffineSingularity*>(&e) ||
      dynamic_cast<const CoverageGap*>(&e) || dynamic_cast<const DimensionMismatch*>(&e))
    return kParseError;
  return kDomainError;
}

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::vector<double>> grid_points(const Grid& g) {
  std::vector<std::vector<double>> pts;
  for (int j = 0; j < g.nt; ++j) {
    double t = g.t0 + (g.t1 - g.t0) * j / (g.nt - 1);
    for (int i = 0; i < g.nx; ++i) pts.push_back({g.x0 + (g.x1 - g.x0) * i / (g.nx - 1), t});
  }
  return pts;
}

// Points at +-delta along each axis across every singular form, plus the
// on-line point, for each grid parameter where the form crosses the box.
std::vector<std::vector<double>> supplement_points(const PiecewiseFn& u, const Grid& g) {
  std::vector<std::vector<double>> pts;
  auto in_box = [&](double x, double t) { return x >= g.x0 && x <= g.x1 && t >= g.t0 && t <= g.t1; };
  for (const auto& f : u.forms) {
    bool by_t = f.a[0] != 0.0;
    int n = by_t ? g.nt : g.nx;
    for (int j = 0; j < n; ++j) {
      double x, t;
      if (by_t) {
        t = g.t0 + (g.t1 - g.t0) * j / (g.nt - 1);
        x = (f.b - f.a[1] * t) / f.a[0];
      } else {
        x = g.x0 + (g.x1 - g.x0) * j / (g.nx - 1);
        t = f.b / f.a[1];
      }
      if (!in_box(x, t)) continue;
      const double d = g.delta;
      const double side[5][2] = {{x - d, t}, {x, t - d}, {x, t}, {x, t + d}, {x + d, t}};
      for (const auto& q : side)
        if (in_box(q[0], q[1])) pts.push_back({q[0], q[1]});
    }
  }
  return pts;
}

const FunctionSpec& spec(const ProblemFile& pf, const char* name) { return pf.data.at(name); }

bool is_wave(const ProblemFile& pf) { return pf.kind != "transport"; }

std::string form_list(const PiecewiseFn& u, const std::vector<std::size_t>& idx) {
  std::string s;
  for (auto k : idx) s += (s.empty() ? "" : "; ") + u.forms[k].str(u.vars);
  return s.empty() ? "none" : s;
}

ResidualReport residual_report(const ProblemFile& pf, const SolutionField& sol,
                               const std::vector<std::vector<double>>& pts) {
  if (!is_wave(pf)) return transport_residual(sol.u, pts);
  if (pf.kind == "wave-nonhomogeneous") {
    PiecewiseFn f = build_function(spec(pf, "f"));
    return wave_residual(sol, &f, pts);
  }
  return wave_residual(sol, nullptr, pts);
}

std::string point_str(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p[i]);
  return s + ")";
}

std::vector<double> singular_points(const PiecewiseFn& u) {
  std::vector<double> out;
  for (const auto& f : u.forms) out.push_back(f.b / f.a[0]);
  return out;
}

}  // namespace

SolutionField solve_problem(const ProblemFile& pf) {
  if (pf.kind.empty()) throw ParseError("no [problem] kind given", 0);
  if (pf.kind == "transport") return solve_transport(build_function(spec(pf, "h")));
  PiecewiseFn phi = build_function(spec(pf, "phi"));
  PiecewiseFn psi = build_function(spec(pf, "psi"));
  if (pf.kind == "wave") return solve_wave_homogeneous(phi, psi);
  if (pf.kind == "wave-halfline") return solve_wave_halfline(phi, psi);
  return solve_wave_nonhomogeneous(phi, psi, build_function(spec(pf, "f")));
}

int cmd_deriv(const ProblemFile& pf, const std::vector<double>& point, const std::string& axis, std::ostream& out) {
  if (!pf.function) throw ParseError("deriv needs a [function] section", 0);
  PiecewiseFn u = build_function(*pf.function);
  if (point.size() != u.dim()) throw DimensionMismatch("point has " + std::to_string(point.size()) +
                                                       " coordinates, function has " + std::to_string(u.dim()));
  std::size_t ax;
  if (axis == "x") ax = 0;
  else if (axis == "y" || axis == "t") ax = 1;
  else throw ParseError("unknown axis '" + axis + "'", 0);
  if (ax >= u.dim()) throw DimensionMismatch("axis '" + axis + "' does not exist for this function");

  auto sd = semi_derivatives(u, point, ax);
  out << "point = ";
  for (std::size_t i = 0; i < point.size(); ++i) out << (i ? ", " : "") << num(point[i]);
  out << "\naxis = " << axis << "\n";
  out << "value = " << num(evaluate(u, point)) << "\n";
  out << "alpha = " << num(sd.right) << "\n";
  out << "beta = " << num(sd.left) << "\n";
  out << "specular = " << num(a_combine(sd.right, sd.left)) << "\n";
  if (sd.numeric) out << "numeric = 1\n";
  if (u.dim() == 2) {
    TangentData td = tangent_data(u, point);
    static const char* names[4] = {"p1", "q1", "p2", "q2"};
    out << "criterion = " << num(td.criterion) << "\n";
    out << "strong = " << (td.normal ? 1 : 0) << "\n";
    if (td.normal) {
      const auto& n = *td.normal;
      out << "normal = " << num(n[0]) << ", " << num(n[1]) << ", " << num(n[2]) << "\n";
    }
    for (const auto& pl : td.planes)
      out << "plane." << names[pl.omitted] << " = " << num(pl.c1) << ", " << num(pl.c2) << ", " << num(pl.c0) << "\n";
    for (auto o : td.degenerate) out << "degenerate." << names[o] << " = 1\n";
  }
  return kOk;
}

int cmd_solve(const ProblemFile& pf, std::ostream& csv, std::ostream& out, std::ostream& err) {
  SolutionField sol = solve_problem(pf);
  const PiecewiseFn& u = sol.u;
  auto grid = grid_points(pf.grid);
  auto extra = supplement_points(u, pf.grid);
  std::vector<std::vector<double>> pts = grid;
  pts.insert(pts.end(), extra.begin(), extra.end());
  ResidualReport rep = residual_report(pf, sol, pts);

  csv << "x,t,u,ux,ut,residual\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    csv << num(p[0]) << ',' << num(p[1]) << ',' << num(evaluate(u, p)) << ',' << num(guarded_partial(u, p, 0)) << ','
        << num(guarded_partial(u, p, 1)) << ',' << num(rep.samples[i].residual) << '\n';
  }
  out << "provenance = " << to_string(sol.provenance) << "\n";
  out << "forms = " << form_list(u, sol.characteristics) << "\n";
  out << "grid_rows = " << grid.size() << "\n";
  out << "supplement_rows = " << extra.size() << "\n";
  out << "max_residual = " << num(rep.max_residual) << "\n";

  S2Report s2 = s2_membership(u);
  if (s2.verdict != S2Verdict::S2)
    err << "warning: solution is not in S2 (verdict " << to_string(s2.verdict)
        << "; failing forms: " << form_list(u, s2.failing_forms) << ")\n";
  return kOk;
}

int cmd_check(const ProblemFile& pf, std::ostream& out) {
  SolutionField sol = solve_problem(pf);
  const PiecewiseFn& u = sol.u;
  std::vector<std::string> checks = pf.checks;
  if (checks.empty()) checks.push_back("residual");
  bool all = true;
  auto verdict = [&](const std::string& name, bool ok) {
    out << name << ".pass = " << (ok ? 1 : 0) << "\n";
    all = all && ok;
  };

  for (const auto& c : checks) {
    if (c == "residual") {
      auto pts = residual_points(u);
      auto grid = grid_points(pf.grid);
      pts.insert(pts.end(), grid.begin(), grid.end());
      auto rep = residual_report(pf, sol, pts);
      out << "# residual: max |r| = " << num(rep.max_residual) << " over " << pts.size() << " points\n";
      out << "residual.max = " << num(rep.max_residual) << "\n";
      out << "residual.max_literal = " << num(rep.max_literal) << "\n";
      verdict("residual", rep.pass(1e-9));
    } else if (c == "s2") {
      auto r = s2_membership(u);
      out << "# s2: verdict " << to_string(r.verdict) << "\n";
      out << "s2.verdict = " << to_string(r.verdict) << "\n";
      out << "s2.failing_forms = " << form_list(u, r.failing_forms) << "\n";
      out << "s2.mixed_jump_forms = " << form_list(u, r.mixed_jump_forms) << "\n";
      out << "s2.symmetry_residual = " << num(r.symmetry_residual) << "\n";
      verdict("s2", r.verdict == S2Verdict::S2);
    } else if (c == "proper") {
      auto r = is_proper(u);
      out << "# proper: " << r.checked_points << " on-line samples, max violation " << num(r.max_violation) << "\n";
      out << "proper.violating_forms = " << form_list(u, r.violating_forms) << "\n";
      verdict("proper", r.proper);
    } else if (c == "hypothesis-h") {
      if (!is_wave(pf)) {
        out << "# hypothesis-h: skipped, not a wave problem\nhypothesis-h.skipped = 1\n";
        continue;
      }
      auto r = hypothesis_h_check(sol, residual_points(u));
      out << "# hypothesis-h: " << r.failures << " failures of " << r.samples.size() << " on-line samples\n";
      out << "hypothesis-h.failures = " << r.failures << "\n";
      for (const auto& s : r.samples)
        if (!s.ok) {
          out << "hypothesis-h.first_failure = " << point_str(s.point) << " " << s.note << "\n";
          break;
        }
      verdict("hypothesis-h", r.pass());
    } else if (c == "boundary") {
      if (pf.kind != "wave-halfline") {
        out << "# boundary: skipped, not a half-line problem\nboundary.skipped = 1\n";
        continue;
      }
      double worst = 0.0;
      for (int k = 1; k <= 100; ++k) {
        const double p[2] = {0.0, pf.grid.t1 * k / 100.0};
        worst = std::max(worst, std::fabs(evaluate(u, p)));
      }
      out << "# boundary: max |u(0,t)| = " << num(worst) << "\n";
      out << "boundary.max = " << num(worst) << "\n";
      verdict("boundary", worst <= 1e-10);
    } else if (c == "initial") {
      const bool wave = is_wave(pf);
      PiecewiseFn u0 = build_function(spec(pf, wave ? "phi" : "h"));
      std::optional<PiecewiseFn> v0;
      if (wave) v0 = build_function(spec(pf, "psi"));
      double lo = pf.kind == "wave-halfline" ? std::max(pf.grid.x0, 0.0) : pf.grid.x0;
      std::vector<double> xs;
      for (int i = 0; i <= 200; ++i) xs.push_back(lo + (pf.grid.x1 - lo) * i / 200.0);
      for (double s : singular_points(u0))
        if (s >= lo && s <= pf.grid.x1) xs.push_back(s);
      if (v0)
        for (double s : singular_points(*v0))
          if (s >= lo && s <= pf.grid.x1) xs.push_back(s);
      double worst_u = 0.0, worst_v = 0.0;
      for (double x : xs) {
        const double p[2] = {x, 0.0};
        const double q[1] = {x};
        worst_u = std::max(worst_u, std::fabs(evaluate(u, p) - evaluate(u0, q)));
        if (v0) worst_v = std::max(worst_v, std::fabs(initial_velocity(u, x) - evaluate(*v0, q)));
      }
      out << "# initial: max |u(x,0) - data| = " << num(worst_u) << ", max |u_t(x,0+) - psi| = " << num(worst_v)
          << "\n";
      out << "initial.displacement = " << num(worst_u) << "\n";
      if (v0) out << "initial.velocity = " << num(worst_v) << "\n";
      verdict("initial", worst_u <= 1e-8 && worst_v <= 1e-8);
    }
  }
  out << "status = " << (all ? "pass" : "fail") << "\n";
  return all ? kOk : kCheckFailed;
}

}  // namespace speculus::cli

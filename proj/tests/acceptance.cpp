// Acceptance runner: `acceptance <n> <speculus-binary> <fixtures-dir>` checks
// criterion n and prints one PASS/FAIL line. Exit status 0 iff it passed.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "speculus/quad.hpp"
#include "speculus/tangent2d.hpp"
#include "speculus/waves.hpp"

using namespace speculus;
using namespace fixtures;

namespace {

// Tolerances, one per quantity named in the criteria.
constexpr double kTolCombine = 1e-12;
constexpr double kTolTable = 1e-12;
constexpr double kTolPoints = 1e-12;
constexpr double kTolPlanes = 1e-9;
constexpr double kTolCriterion = 1e-12;
constexpr double kTolFtc = 1e-10;
constexpr double kTolClosedForm = 1e-10;
constexpr double kTolResidual = 1e-9;
constexpr double kTolBoundary = 1e-10;
constexpr double kTolDuhamel = 1e-10;
constexpr double kTolClassicalGrid = 1e-8;
constexpr double kTolClassicalOps = 1e-12;
constexpr double kTolGreen = 1e-8;
constexpr double kTolGreenExact = 1e-9;
constexpr double kTolSymmetry = 1e-9;

const double r2 = std::sqrt(2.0), r5 = std::sqrt(5.0), r10 = std::sqrt(10.0);

// Collects failed sub-checks for the report line.
struct Verdict {
  std::vector<std::string> failures;
  std::size_t checks = 0;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    ++checks;
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(17);
      s << what << " (got " << got << ", want " << want << ")";
      failures.push_back(s.str());
    }
  }
};

double at(const PiecewiseFn& u, double x, double y) {
  const double p[2] = {x, y};
  return evaluate(u, p);
}

double at1(const PiecewiseFn& u, double x) {
  const double p[1] = {x};
  return evaluate(u, p);
}

// F1 closed form in extended precision; independent of the library.
double f1(double a, double b) {
  long double A = a, B = b;
  return static_cast<double>((A * B - 1 + std::sqrt((A * A + 1) * (B * B + 1))) / (A + B));
}

// ---------------------------------------------------------------- criteria

void c1(Verdict& v) {
  v.near(a_combine(1, 0), r2 - 1, kTolCombine, "A(1,0)");
  v.near(a_combine(2, -1), r10 - 3, kTolCombine, "A(2,-1)");
  v.expect(a_combine(3, -3) == 0.0, "A(3,-3) exactly 0");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> m(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    double x = m(rng);
    v.near(a_combine(x, x), x, kTolCombine * (1 + std::fabs(x)), "A(m,m)");
  }
  std::uniform_real_distribution<double> d(-50, 50);
  int n = 0;
  while (n < 10000) {
    double a = d(rng), b = d(rng);
    if (std::fabs(a + b) <= 1e-6) continue;
    ++n;
    double ref = f1(a, b);
    v.near(a_combine(a, b), ref, kTolCombine * (1 + std::fabs(ref)), "F1 vs F2");
  }
}

void c2(Verdict& v) {
  auto u = from_expression("abs(2*x - y) + abs(x - 3)", kXY);
  auto ux = specular_field(u, 0);
  struct Row {
    double x, y, want;
    bool exact;
    const char* name;
  } rows[] = {
      {4, 1, 3, true, "2x-y>0, x>3"},
      {1, 1, 1, true, "2x-y>0, x<3"},
      {4, 9, -1, true, "2x-y<0, x>3"},
      {1, 5, -3, true, "2x-y<0, x<3"},
      {3, 1, a_combine(3, 1), false, "2x-y>0, x=3"},
      {4, 8, a_combine(3, -1), false, "2x-y=0, x>3"},
      {3, 6, a_combine(3, -3), false, "2x-y=0, x=3"},
      {1, 2, a_combine(1, -3), false, "2x-y=0, x<3"},
      {3, 9, a_combine(-1, -3), false, "2x-y<0, x=3"},
  };
  for (auto& r : rows) {
    double got = at(ux, r.x, r.y);
    if (r.exact)
      v.expect(got == r.want, std::string("constant entry ") + r.name);
    else
      v.near(got, r.want, kTolTable, std::string("A entry ") + r.name);
  }
  auto rep = classify_continuity(ux);
  std::vector<std::string> names;
  for (auto k : rep.jump_forms) names.push_back(ux.forms[k].str(kXY));
  std::sort(names.begin(), names.end());
  auto a = AffineForm{{2, -1}, 0}.normalized().str(kXY), b = AffineForm{{1, 0}, 3}.normalized().str(kXY);
  std::vector<std::string> want{a, b};
  std::sort(want.begin(), want.end());
  v.expect(names == want, "jump lines are exactly 2x-y and x-3");
  v.expect(rep.indeterminate_forms.empty(), "no indeterminate lines");
}

void c3(Verdict& v) {
  auto u = from_expression("(1/2)*(x + abs(x)) + (1/2)*y + (3/2)*abs(y)", kXY);
  std::vector<double> o{0, 0};
  auto s = sphere_points(u, o);
  Vec3 want[4] = {{1 / r2, 0, 1 / r2}, {-1, 0, 0}, {0, 1 / r5, 2 / r5}, {0, -1 / r2, 1 / r2}};
  Vec3 got[4] = {s.p1, s.q1, s.p2, s.q2};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 3; ++i) v.near(got[k][i], want[k][i], kTolPoints, "sphere point " + std::to_string(k));

  // printed planes, z = c1 x + c2 y + c0
  std::vector<std::array<double, 3>> printed{
      {r2 - 1, -(r10 - r5 - 2), r2 - 1},
      {r2 - 1, -(r2 - 1), r2 - 1},
      {-(r10 - 3), r10 - 3, r5 - r2},
      {r5 - r2, r10 - 3, r5 - r2},
  };
  auto planes = weak_tangent_planes(u, o);
  v.expect(planes.size() == 4, "four weak planes");
  for (std::size_t k = 0; k < printed.size(); ++k) {
    bool matched = std::any_of(planes.begin(), planes.end(), [&](const Plane& pl) {
      return std::fabs(pl.c1 - printed[k][0]) <= kTolPlanes && std::fabs(pl.c2 - printed[k][1]) <= kTolPlanes &&
             std::fabs(pl.c0 - printed[k][2]) <= kTolPlanes;
    });
    v.expect(matched, "printed plane " + std::to_string(k + 1) + " reproduced");
  }

  v.near(strong_criterion_residual(from_expression("abs(x) - abs(y) - x - y", kXY), o), 4 * (1 + r5),
         kTolCriterion, "criterion for |x|-|y|-x-y");
  v.near(strong_criterion_residual(u, o), r5 - 2 * r2 - 3, kTolCriterion, "criterion for the half-sum example");
}

void c4(Verdict& v) {
  v.near(integrate_1d(from_expression("sgn(x)", kX), -1, 2), 1.0, kTolFtc, "integral of sgn on [-1,2]");
  v.expect(antiderivative_check(from_expression("sgn(x)", kX), from_expression("abs(x)", kX), -1, 2) <= kTolFtc,
           "antiderivative_check(sgn, |x|)");
  auto elu = from_expression("elu(x)", kX);
  auto d1 = specular_field(elu, 0);
  auto d2 = specular_field(d1, 0);
  v.expect(classify_continuity(d1).verdict == ContinuityVerdict::Continuous, "elu' continuous");
  v.near(at1(d2, 0), r2 - 1, kTolCombine, "elu'' at 0 is A(0,1)");
  for (int i = 1; i <= 20; ++i) {
    double x = 0.15 * i;
    v.near(at1(d2, -x), std::exp(-x), 1e-14, "elu'' left branch");
    v.expect(at1(d2, x) == 0.0, "elu'' right branch");
  }
  v.expect(is_proper(d2).proper, "elu'' proper");
}

void c5(Verdict& v) {
  auto s = solve_wave_halfline(halfline_phi(), halfline_psi());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0, 4);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    double x = d(rng), t = d(rng);
    worst = std::max(worst, std::fabs(at(s.u, x, t) - halfline_closed(x, t)));
  }
  v.near(worst, 0, kTolClosedForm, "closed form at 1000 points");
  v.near(at(s.u, 2, 1), 4.0, kTolClosedForm, "u(2,1)");
  v.near(at(s.u, 0.5, 1.5), 0.75, kTolClosedForm, "u(0.5,1.5)");

  auto pts = residual_points(s.u);
  for (int j = 0; j <= 30; ++j)
    for (int i = 0; i <= 30; ++i) pts.push_back({0.1 * i, 0.1 * j});
  const double A20 = a_combine(2, 0);
  std::vector<std::vector<double>> on_a, on_b, on_diag;
  for (int i = 1; i < 10; ++i) {
    double x = 0.05 * i;  // x + t = 1 with x < t and x > t
    on_a.push_back({x, 1 - x});
    on_a.push_back({1 - x, x});
    on_b.push_back({x, 1 + x});      // t - x = 1
    on_diag.push_back({0.3 * i, 0.3 * i});  // t = x
  }
  for (auto* set : {&on_a, &on_b, &on_diag}) pts.insert(pts.end(), set->begin(), set->end());
  auto rep = wave_residual(s, nullptr, pts);
  v.near(rep.max_residual, 0, kTolResidual, "residual everywhere");
  for (auto* set : {&on_a, &on_b}) {
    auto r = wave_residual(s, nullptr, *set);
    for (auto& smp : r.samples) {
      v.near(smp.dxx, A20, kTolCombine, "d_x u_x = A(2,0) on line");
      v.near(smp.dtt, A20, kTolCombine, "d_t u_t = A(2,0) on line");
    }
  }
  auto phi = halfline_phi(), psi = halfline_psi();
  for (int i = 1; i <= 100; ++i) v.near(at(s.u, 0, 0.04 * i), 0, kTolBoundary, "u(0,t)");
  for (int i = 0; i <= 200; ++i) {
    double x = 0.02 * i;
    v.near(at(s.u, x, 0), at1(phi, x), kTolBoundary, "u(x,0) = phi");
    v.near(initial_velocity(s.u, x), at1(psi, x), kTolBoundary, "u_t(x,0) = psi");
  }
}

void c6(Verdict& v) {
  auto f = counterexample_force();
  auto printed = counterexample_printed_u();
  auto sol = solve_wave_nonhomogeneous(counterexample_phi(), from_expression("0", kX), f);

  // the solver against the printed three-region field, region by region
  struct Probe {
    double x, t;
    const char* region;
  } probes[] = {{3, 1, "right region"}, {0.5, 1, "middle region"}, {-0.5, 2, "middle region"},
                {-3, 1, "left region"}, {2, 2, "line x=t"},       {-1, 1, "line x=-t"}};
  for (auto& p : probes)
    v.near(at(sol.u, p.x, p.t), at(printed, p.x, p.t), kTolClosedForm,
           std::string("solver vs printed u, ") + p.region + " at (" + std::to_string(p.x) + "," +
               std::to_string(p.t) + ")");

  v.near(at(printed, 1, 1), 2.5, kTolClosedForm, "u(1,1) on the x=t assigned branch");
  const double p11[2] = {1, 1};
  auto lim = one_sided_limits(printed, p11, 0);
  v.near(lim.left, 3.0, kTolClosedForm, "left x-limit at (1,1)");
  v.near(lim.right - lim.left, -0.5, kTolClosedForm, "jump at (1,1)");

  // printed u against printed f on the five region/line cases
  std::vector<std::vector<double>> cases{{3, 1}, {0.5, 1}, {-3, 1}, {1.5, 1.5}, {-1.5, 1.5}};
  auto rep = wave_residual(printed, &f, cases);
  v.near(rep.max_residual, 0, kTolResidual, "printed u residual against f");

  auto s2 = s2_membership(printed);
  v.expect(s2.verdict != S2Verdict::S2, "printed u is not in S2");
  auto named = [&](const AffineForm& g) {
    auto n = g.normalized();
    return std::any_of(s2.failing_forms.begin(), s2.failing_forms.end(),
                       [&](std::size_t k) { return printed.forms[k].same_as(n); });
  };
  v.expect(named(AffineForm{{1, -1}, 0}), "x=t named");
  v.expect(named(AffineForm{{1, 1}, 0}), "x=-t named");

  // force term alone against the printed -t^2/2, 0, t^2/2
  auto D = duhamel_term(f);
  for (double t : {0.5, 1.0, 2.0}) {
    v.near(at(D, t + 1.5, t), -0.5 * t * t, kTolDuhamel, "force term, right region");
    v.near(at(D, 0.25 * t, t), 0.0, kTolDuhamel, "force term, middle region (printed 0)");
    v.near(at(D, -t - 1.5, t), 0.5 * t * t, kTolDuhamel, "force term, left region");
  }
}

void c7(Verdict& v) {
  struct Smooth {
    const char* phi;
    const char* psi;
    std::function<double(double, double)> exact;
  } data[] = {
      {"sin(x)", "cos(x)",
       [](double x, double t) {
         return 0.5 * (std::sin(x + t) + std::sin(x - t)) + 0.5 * (std::sin(x + t) - std::sin(x - t));
       }},
      {"x^3 - x", "x^2",
       [](double x, double t) {
         auto P = [](double s) { return s * s * s - s; };
         return 0.5 * (P(x + t) + P(x - t)) + (std::pow(x + t, 3) - std::pow(x - t, 3)) / 6;
       }},
      {"exp(x/2)", "1 + x",
       [](double x, double t) {
         return 0.5 * (std::exp((x + t) / 2) + std::exp((x - t) / 2)) + t + x * t;
       }},
  };
  for (auto& s : data) {
    auto sol = solve_wave_homogeneous(from_expression(s.phi, kX), from_expression(s.psi, kX));
    double worst = 0;
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i) {
        double x = -2 + 0.1 * i, t = 0.05 * j;
        worst = std::max(worst, std::fabs(at(sol.u, x, t) - s.exact(x, t)));
      }
    v.near(worst, 0, kTolClassicalGrid, std::string("d'Alembert vs classical for phi = ") + s.phi);
  }

  const char* fns[] = {"x^3 - 2*x*y + y^2", "sin(x)*cos(y) + x", "exp(x - y)*y"};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2, 2);
  for (const char* fs : fns) {
    auto e = parse(fs, kXY);
    auto u = from_expression(e, kXY);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> p{d(rng), d(rng)};
      double gx = eval(diff(e, 0), p), gy = eval(diff(e, 1), p);
      v.near(specular_partial(u, p, 0), gx, kTolClassicalOps * (1 + std::fabs(gx)), std::string("d_x ") + fs);
      v.near(specular_partial(u, p, 1), gy, kTolClassicalOps * (1 + std::fabs(gy)), std::string("d_y ") + fs);
      if (i % 50 == 0) {
        v.expect(strong_criterion_residual(u, p) == 0.0, std::string("criterion zero for ") + fs);
        auto n = specular_normal(u, p);
        v.near(n[0], gx, kTolClassicalOps * (1 + std::fabs(gx)), "normal x");
        v.near(n[1], gy, kTolClassicalOps * (1 + std::fabs(gy)), "normal y");
        v.expect(n[2] == -1.0, "normal z");
      }
    }
  }
}

void c8(Verdict& v) {
  struct G {
    const char* P;
    const char* Q;
    TypeIIIRegion r;
  } fixtures[] = {
      {"(1/2)*x*abs(x)", "0", TypeIIIRegion::rectangle(-1, 1, -1, 1)},
      {"0", "0", TypeIIIRegion::rectangle(-1, 1, -1, 1)},
      {"0", "(1/2)*y*abs(y)", TypeIIIRegion::rectangle(-1, 1, -1, 1)},
      {"abs(x + y - 0.5)", "x*abs(y)", TypeIIIRegion::right_triangle(-1, 1, -1, 1)},
      {"sin(x)*y", "exp(x)*y^2", TypeIIIRegion::rectangle(0, 2, -1, 1)},
      {"elu(x - y)", "(1/2)*(x + y)*abs(x + y)", TypeIIIRegion::right_triangle(-1, 1, -1, 1)},
  };
  for (auto& g : fixtures) {
    v.expect(region_consistent(g.r), "region consistent");
    auto res = green_check(from_expression(g.P, kXY), from_expression(g.Q, kXY), g.r);
    v.near(res.gap, 0, kTolGreen, std::string("gap for P = ") + g.P + ", Q = " + g.Q);
    v.expect(res.class_ok, std::string("class check for P = ") + g.P);
  }
  auto first = green_check(from_expression("(1/2)*x*abs(x)", kXY), from_expression("0", kXY),
                           TypeIIIRegion::rectangle(-1, 1, -1, 1));
  v.near(first.lhs, 2.0, kTolGreenExact, "lhs = 2");
  v.near(first.rhs, 2.0, kTolGreenExact, "rhs = 2");
}

void c9(Verdict& v) {
  const char* spline =
      "((x+1.5)^2 + (x+1.5)*abs(x+1.5))/4 - 3*((x+0.5)^2 + (x+0.5)*abs(x+0.5))/4"
      " + 3*((x-0.5)^2 + (x-0.5)*abs(x-0.5))/4 - ((x-1.5)^2 + (x-1.5)*abs(x-1.5))/4";
  std::vector<std::pair<std::string, PiecewiseFn>> cands{
      {"q(x)+q(y)", from_expression("(1/2)*x*abs(x) + (1/2)*y*abs(y)", kXY)},
      {"|2x-y|+|x-3|", from_expression("abs(2*x - y) + abs(x - 3)", kXY)},
      {"polynomial", from_expression("x^3 - 2*x*y + y^2", kXY)},
      {"sin cos", from_expression("sin(x)*cos(y)", kXY)},
      {"q(x-y)", from_expression("(1/2)*(x - y)*abs(x - y)", kXY)},
      {"wave sin/cos", solve_wave_homogeneous(from_expression("sin(x)", kX), from_expression("cos(x)", kX)).u},
      {"wave spline", solve_wave_homogeneous(from_expression(spline, kX), from_expression("0", kX)).u},
      {"half-line example", solve_wave_halfline(halfline_phi(), halfline_psi()).u},
      {"transport elu", solve_transport(from_expression("elu(x)", kX)).u},
  };
  std::size_t s2 = 0;
  for (auto& [name, u] : cands) {
    auto r = s2_membership(u);
    if (r.verdict != S2Verdict::S2) continue;
    ++s2;
    double worst = r.symmetry_residual;
    auto ux = specular_field(u, 0), uy = specular_field(u, 1);
    for (auto& p : symmetry_samples(u)) {
      try {
        worst = std::max(worst, std::fabs(specular_partial(uy, p, 0) - specular_partial(ux, p, 1)));
      } catch (const Error&) {
      }
    }
    v.near(worst, 0, kTolSymmetry, "mixed symmetry for " + name);
  }
  v.expect(s2 >= 3, "at least three S2 fixtures");
}

// ------------------------------------------------------- determinism (10)

struct Output {
  int code = -1;
  std::string text;
};

Output run(const std::string& cmd) {
  Output o;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) o.text.append(buf, n);
  int st = pclose(p);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void c10(Verdict& v, const std::string& bin, const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".ini") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  v.expect(!files.empty(), "fixtures found");

  auto tmp = fs::temp_directory_path() / ("speculus_acc_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  // deriv-only fixtures carry a [function] section and no [problem]
  const std::map<std::string, std::string> points{{"deriv_abs", "3,6"},    {"deriv_tangent", "0,0"},
                                                  {"deriv_poly", "1,2"},   {"deriv_elu", "0"},
                                                  {"bad_expr", "1"}};
  for (auto& f : files) {
    std::string stem = f.stem().string();
    std::string snapshot[2];
    for (int k = 0; k < 2; ++k) {
      std::string out;
      auto it = points.find(stem);
      if (it != points.end()) {
        auto r = run(bin + " deriv " + f.string() + " --point " + it->second);
        out = std::to_string(r.code) + "\n" + r.text;
      } else {
        auto csv = (tmp / (stem + "_" + std::to_string(k) + ".csv")).string();
        auto s = run(bin + " solve " + f.string() + " --out " + csv);
        auto c = run(bin + " check " + f.string());
        out = std::to_string(s.code) + "\n" + s.text + slurp(csv) + std::to_string(c.code) + "\n" + c.text;
      }
      snapshot[k] = out;
    }
    v.expect(snapshot[0] == snapshot[1], "byte-identical output for " + stem);
    v.expect(!snapshot[0].empty(), "non-empty output for " + stem);
  }
  fs::remove_all(tmp);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <criterion 1-10> [speculus-binary fixtures-dir]\n";
    return 2;
  }
  int n = std::atoi(argv[1]);
  Verdict v;
  try {
    switch (n) {
      case 1: c1(v); break;
      case 2: c2(v); break;
      case 3: c3(v); break;
      case 4: c4(v); break;
      case 5: c5(v); break;
      case 6: c6(v); break;
      case 7: c7(v); break;
      case 8: c8(v); break;
      case 9: c9(v); break;
      case 10:
        if (argc < 4) {
          std::cerr << "criterion 10 needs the speculus binary and the fixtures directory\n";
          return 2;
        }
        c10(v, argv[2], argv[3]);
        break;
      default: std::cerr << "unknown criterion " << n << "\n"; return 2;
    }
  } catch (const std::exception& e) {
    v.failures.push_back(std::string("exception: ") + e.what());
  }
  bool pass = v.failures.empty();
  std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << " (" << v.checks << " checks, "
            << v.failures.size() << " failed)\n";
  std::size_t shown = 0;
  for (auto& f : v.failures) {
    if (++shown > 12) {
      std::cout << "  ... " << v.failures.size() - 12 << " more\n";
      break;
    }
    std::cout << "  " << f << "\n";
  }
  return pass ? 0 : 1;
}

#include "speculus/quad.hpp"

#include <algorithm>
#include <cmath>

#include "speculus/specular.hpp"

namespace speculus {

namespace {

struct Rule {
  std::array<double, 15> x{}, w{};
  Rule() {
    constexpr int n = 15;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        double dz = p1 / dp;
        z -= dz;
        if (std::fabs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const Rule& rule() {
  static const Rule r;
  return r;
}

double gl(const std::function<double(double)>& f, double a, double b) {
  const auto& r = rule();
  double h = 0.5 * (b - a), m = 0.5 * (a + b), s = 0.0;
  for (int i = 0; i < 15; ++i) s += r.w[i] * f(m + h * r.x[i]);
  return h * s;
}

struct Adaptive {
  const std::function<double(double)>& f;
  const QuadOptions& opt;
  bool failed = false;
  double worst_a = 0, worst_b = 0, worst_err = -1;

  double run(double a, double b, double whole, int depth) {
    double m = 0.5 * (a + b);
    double l = gl(f, a, m), r = gl(f, m, b);
    double err = std::fabs(l + r - whole);
    if (err <= opt.tol * std::max(1.0, std::fabs(l + r))) return l + r;
    if (depth >= opt.max_depth) {
      failed = true;
      if (err > worst_err) {
        worst_err = err;
        worst_a = a;
        worst_b = b;
      }
      return l + r;
    }
    return run(a, m, l, depth + 1) + run(m, b, r, depth + 1);
  }
};

// Roots of g on [a, b] found by a uniform scan and bisection.
std::vector<double> scan_roots(const std::function<double(double)>& g, double a, double b, int n = 256) {
  std::vector<double> out;
  double h = (b - a) / n;
  double x0 = a, g0 = g(a);
  for (int i = 1; i <= n; ++i) {
    double x1 = (i == n) ? b : a + i * h, g1 = g(x1);
    if (g0 == 0.0) {
      out.push_back(x0);
    } else if (g0 * g1 < 0.0) {
      double lo = x0, hi = x1, glo = g0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(lo)); ++it) {
        double mid = 0.5 * (lo + hi), gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    g0 = g1;
  }
  if (g0 == 0.0) out.push_back(b);
  return out;
}

double at2(const PiecewiseFn& u, double x, double y) {
  const double p[2] = {x, y};
  return evaluate(u, p);
}

// x-coordinates where two non-parallel 2D forms meet.
void pairwise_x(const std::vector<AffineForm>& forms, std::vector<double>& out) {
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (std::size_t j = i + 1; j < forms.size(); ++j) {
      const auto& f = forms[i];
      const auto& g = forms[j];
      double det = f.a[0] * g.a[1] - f.a[1] * g.a[0];
      if (std::fabs(det) < 1e-14) continue;
      out.push_back((f.b * g.a[1] - f.a[1] * g.b) / det);
    }
}

// Crossings y of the forms with the vertical line at x.
std::vector<double> y_crossings(const std::vector<AffineForm>& forms, double x) {
  std::vector<double> out;
  for (const auto& f : forms)
    if (f.a[1] != 0.0) out.push_back((f.b - f.a[0] * x) / f.a[1]);
  return out;
}

double region_integral(const std::function<double(double, double)>& h, const std::vector<AffineForm>& forms,
                       const TypeIIIRegion& r, const QuadOptions& opt) {
  std::vector<double> xb;
  for (const auto& f : forms) {
    if (f.a[1] == 0.0 && f.a[0] != 0.0) xb.push_back(f.b / f.a[0]);
    for (const auto* w : {&r.lower, &r.upper}) {
      auto roots = scan_roots([&](double x) { return f.a[0] * x + f.a[1] * (*w)(x) - f.b; }, r.a, r.b);
      xb.insert(xb.end(), roots.begin(), roots.end());
    }
  }
  pairwise_x(forms, xb);
  auto outer = [&](double x) {
    return integrate([&](double y) { return h(x, y); }, r.lower(x), r.upper(x), y_crossings(forms, x), opt);
  };
  return integrate(outer, r.a, r.b, xb, opt);
}

std::function<double(double)> derivative_of(const std::function<double(double)>& w,
                                            const std::function<double(double)>& dw) {
  if (dw) return dw;
  return [w](double x) {
    const double h = 1e-6;
    return (w(x + h) - w(x - h)) / (2 * h);
  };
}

std::vector<AffineForm> merged_forms(const PiecewiseFn& P, const PiecewiseFn& Q) {
  std::vector<AffineForm> out = P.forms;
  for (const auto& f : Q.forms) {
    bool dup = false;
    for (const auto& g : out) dup = dup || g.same_as(f);
    if (!dup) out.push_back(f);
  }
  return out;
}

}  // namespace

const std::array<double, 15>& gl15_nodes() { return rule().x; }
const std::array<double, 15>& gl15_weights() { return rule().w; }

double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breaks,
                 const QuadOptions& opt) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, std::move(breaks), opt);
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b && x - pts.back() > 1e-14 * (1.0 + std::fabs(x))) pts.push_back(x);
  if (b - pts.back() <= 1e-14 * (1.0 + std::fabs(b)) && pts.size() > 1) pts.back() = b;
  else pts.push_back(b);
  Adaptive ad{f, opt};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += ad.run(pts[i], pts[i + 1], gl(f, pts[i], pts[i + 1]), 0);
  if (ad.failed)
    throw QuadratureError("quadrature did not converge on [" + std::to_string(ad.worst_a) + ", " +
                              std::to_string(ad.worst_b) + "]",
                          ad.worst_a, ad.worst_b);
  return total;
}

double integrate_1d(const PiecewiseFn& f, double a, double b, const QuadOptions& opt) {
  if (f.dim() != 1) throw DimensionMismatch("integrate_1d needs a 1D function");
  std::vector<double> breaks;
  for (const auto& form : f.forms) breaks.push_back(form.b / form.a[0]);
  return integrate(
      [&](double x) {
        const double p[1] = {x};
        return evaluate(f, p);
      },
      a, b, breaks, opt);
}

double antiderivative_check(const PiecewiseFn& f, const PiecewiseFn& F, double a, double b,
                            const QuadOptions& opt) {
  const double pa[1] = {a}, pb[1] = {b};
  double worst = std::fabs(integrate_1d(f, a, b, opt) - (evaluate(F, pb) - evaluate(F, pa)));
  for (const auto& form : F.forms) {
    double s = form.b / form.a[0];
    if (s < std::min(a, b) || s > std::max(a, b)) continue;
    const double ps[1] = {s};
    worst = std::max(worst, std::fabs(specular_partial(F, ps, 0) - evaluate(f, ps)));
  }
  return worst;
}

double integrate_triangle(const PiecewiseFn& f, double x0, double t0, const QuadOptions& opt) {
  if (f.dim() != 2) throw DimensionMismatch("integrate_triangle needs a function of (x, t)");
  if (t0 <= 0.0) return 0.0;
  std::vector<double> sb;
  for (const auto& form : f.forms) {
    double ax = form.a[0], at = form.a[1];
    if (at != ax) sb.push_back((form.b - ax * (x0 + t0)) / (at - ax));
    if (at != -ax) sb.push_back((form.b - ax * (x0 - t0)) / (ax + at));
    if (ax == 0.0 && at != 0.0) sb.push_back(form.b / at);
  }
  for (std::size_t i = 0; i < f.forms.size(); ++i)
    for (std::size_t j = i + 1; j < f.forms.size(); ++j) {
      const auto& g = f.forms[i];
      const auto& h = f.forms[j];
      double det = g.a[0] * h.a[1] - g.a[1] * h.a[0];
      if (std::fabs(det) < 1e-14) continue;
      sb.push_back((g.a[0] * h.b - g.b * h.a[0]) / det);
    }
  auto inner = [&](double s) {
    std::vector<double> yb;
    for (const auto& form : f.forms)
      if (form.a[0] != 0.0) yb.push_back((form.b - form.a[1] * s) / form.a[0]);
    return integrate([&](double y) { return at2(f, y, s); }, x0 - (t0 - s), x0 + (t0 - s), yb, opt);
  };
  return integrate(inner, 0.0, t0, sb, opt);
}

TypeIIIRegion TypeIIIRegion::rectangle(double x0, double x1, double y0, double y1) {
  TypeIIIRegion r;
  r.a = x0;
  r.b = x1;
  r.lower = [y0](double) { return y0; };
  r.upper = [y1](double) { return y1; };
  r.dlower = r.dupper = [](double) { return 0.0; };
  r.c = y0;
  r.d = y1;
  r.left = [x0](double) { return x0; };
  r.right = [x1](double) { return x1; };
  return r;
}

TypeIIIRegion TypeIIIRegion::right_triangle(double x0, double x1, double y0, double y1) {
  TypeIIIRegion r;
  double slope = (y1 - y0) / (x1 - x0);
  r.a = x0;
  r.b = x1;
  r.lower = [y0](double) { return y0; };
  r.upper = [=](double x) { return y1 - slope * (x - x0); };
  r.dlower = [](double) { return 0.0; };
  r.dupper = [slope](double) { return -slope; };
  r.c = y0;
  r.d = y1;
  r.left = [x0](double) { return x0; };
  r.right = [=](double y) { return x0 + (y1 - y) / slope; };
  return r;
}

bool region_consistent(const TypeIIIRegion& r, int n) {
  const double margin = 1e-9 * (1.0 + std::fabs(r.b - r.a) + std::fabs(r.d - r.c));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = r.a + (r.b - r.a) * (i + 0.5) / n;
      double y = r.c + (r.d - r.c) * (j + 0.5) / n;
      double d1 = std::min(y - r.lower(x), r.upper(x) - y);
      double d2 = std::min(x - r.left(y), r.right(y) - x);
      if (std::fabs(d1) < margin || std::fabs(d2) < margin) continue;  // boundary band
      if ((d1 > 0) != (d2 > 0)) return false;
    }
  return true;
}

double integrate_region(const PiecewiseFn& g, const TypeIIIRegion& r, const QuadOptions& opt) {
  if (g.dim() != 2) throw DimensionMismatch("integrate_region needs a 2D function");
  return region_integral([&](double x, double y) { return at2(g, x, y); }, g.forms, r, opt);
}

GreenResult green_check(const PiecewiseFn& P, const PiecewiseFn& Q, const TypeIIIRegion& r, const QuadOptions& opt) {
  if (P.dim() != 2 || Q.dim() != 2) throw DimensionMismatch("green_check needs 2D P and Q");
  GreenResult res;
  PiecewiseFn px = specular_field(P, 0);
  PiecewiseFn qy = specular_field(Q, 1);
  res.class_ok = classify_continuity(P).verdict == ContinuityVerdict::Continuous &&
                 classify_continuity(Q).verdict == ContinuityVerdict::Continuous && is_proper(px).proper &&
                 is_proper(qy).proper;

  auto forms = merged_forms(P, Q);
  res.lhs = region_integral([&](double x, double y) { return at2(px, x, y) - at2(qy, x, y); }, forms, r, opt);

  auto curve_breaks = [&](const std::function<double(double)>& w) {
    std::vector<double> xb;
    for (const auto& f : forms) {
      auto roots = scan_roots([&](double x) { return f.a[0] * x + f.a[1] * w(x) - f.b; }, r.a, r.b);
      xb.insert(xb.end(), roots.begin(), roots.end());
    }
    return xb;
  };
  auto dl = derivative_of(r.lower, r.dlower);
  auto du = derivative_of(r.upper, r.dupper);
  double bottom = integrate(
      [&](double x) {
        double y = r.lower(x);
        return at2(P, x, y) * dl(x) + at2(Q, x, y);
      },
      r.a, r.b, curve_breaks(r.lower), opt);
  double top = integrate(
      [&](double x) {
        double y = r.upper(x);
        return at2(P, x, y) * du(x) + at2(Q, x, y);
      },
      r.a, r.b, curve_breaks(r.upper), opt);
  double right = integrate([&](double y) { return at2(P, r.b, y); }, r.lower(r.b), r.upper(r.b),
                           y_crossings(forms, r.b), opt);
  double left = integrate([&](double y) { return at2(P, r.a, y); }, r.lower(r.a), r.upper(r.a),
                          y_crossings(forms, r.a), opt);
  res.rhs = bottom + right - top - left;
  res.gap = std::fabs(res.lhs - res.rhs);
  return res;
}

}  // namespace speculus

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "speculus/piecewise.hpp"
#include "speculus/specular.hpp"

namespace speculus {

enum class Provenance { Transport, DAlembert, HalfLine, Duhamel };
std::string to_string(Provenance p);

// Solver output over (x, t).
struct SolutionField {
  PiecewiseFn u;
  Provenance provenance = Provenance::Transport;
  std::vector<std::size_t> characteristics;  // indices into u.forms
  std::optional<PiecewiseFn> duhamel;        // the force term alone (Duhamel provenance)
  bool duhamel_symbolic = false;
};

// h(c_x * x + c_t * t) as a function of (x, t).
PiecewiseFn compose(const PiecewiseFn& h, double cx, double ct);

// Psi(s) = int_0^s psi. Symbolic per piece when possible, otherwise each piece
// is an opaque function backed by quadrature.
PiecewiseFn antiderivative_fn(const PiecewiseFn& psi);

// 1/2 double integral of f over the backward characteristic triangle, as a
// function of the apex (x, t). Folded to per-region quadratics when f is
// piecewise constant with characteristic singular lines only.
PiecewiseFn duhamel_term(const PiecewiseFn& f, bool* symbolic = nullptr);

SolutionField solve_transport(const PiecewiseFn& h);
SolutionField solve_wave_homogeneous(const PiecewiseFn& phi, const PiecewiseFn& psi);
SolutionField solve_wave_halfline(const PiecewiseFn& phi, const PiecewiseFn& psi);
SolutionField solve_wave_nonhomogeneous(const PiecewiseFn& phi, const PiecewiseFn& psi, const PiecewiseFn& f);

struct ResidualSample {
  std::vector<double> point;
  bool on_line = false;
  double residual = 0.0;  // A-combined operator minus forcing
  double literal = 0.0;   // d^S_t(u_t) - d^S_x(u_x) - forcing, per axis
  double dxx = 0.0;       // d^S_x(u_x)
  double dtt = 0.0;       // d^S_t(u_t)
  double forcing = 0.0;
};

struct ResidualReport {
  double max_residual = 0.0;
  double max_literal = 0.0;
  std::vector<ResidualSample> samples;
  bool pass(double tol = 1e-9) const { return max_residual <= tol; }
};

// Derivative of the branch adjacent on `side` (+1 or -1) along `axis`.
double one_sided_partial(const PiecewiseFn& u, std::span<const double> p, std::size_t axis, int side);
// Specular partial, or the one-sided partial where only one side has a branch
// (points on the boundary of the domain).
double guarded_partial(const PiecewiseFn& u, std::span<const double> p, std::size_t axis);

// Right-sided time derivative of u at (x, 0), taken on the face entered from t = 0.
double initial_velocity(const PiecewiseFn& u, double x);

// Face representatives and line samples of u (inside its domain).
std::vector<std::vector<double>> residual_points(const PiecewiseFn& u, const SamplingOptions& opt = {});

ResidualReport wave_residual(const SolutionField& u, const PiecewiseFn* f,
                             const std::vector<std::vector<double>>& points);
ResidualReport wave_residual(const PiecewiseFn& u, const PiecewiseFn* f,
                             const std::vector<std::vector<double>>& points);
// d^S_t u + d^S_x u at each point.
ResidualReport transport_residual(const PiecewiseFn& u, const std::vector<std::vector<double>>& points);

struct HypothesisSample {
  std::vector<double> point;
  double residual = 0.0;
  bool ok = false;
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisSample> samples;
  std::size_t failures = 0;
  bool pass() const { return failures == 0; }
};

// v = u_t - u_x as a piecewise function with the singular forms of u.
PiecewiseFn hypothesis_field(const PiecewiseFn& u);
HypothesisReport hypothesis_h_check(const SolutionField& u, const std::vector<std::vector<double>>& points);

}  // namespace speculus

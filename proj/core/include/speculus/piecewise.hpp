#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "speculus/expr.hpp"

namespace speculus {

using PointFn = std::function<double(std::span<const double>)>;

inline constexpr int kWild = 2;  // '*' entry in a sign pattern

// One row of a branch table. Either symbolic (`expr`) or pointwise (`closure`).
struct Branch {
  std::vector<int> pattern;  // entries in {-1, 0, +1, kWild}
  Expr expr;
  PointFn closure;

  double value(std::span<const double> p) const;
  bool symbolic() const { return expr != nullptr; }
};

enum class LinePolicy {
  BranchAssigned,       // value comes from an explicit table row
  SpecularCombination,  // A-combination of the one-sided limits
  DirectEval,           // evaluate the source expression (sgn(0) = 0)
};

// Function on R^d (d = 1 or 2) with affine singular forms and a first-match
// branch table. `domain` holds forms that must be strictly positive; they
// restrict region enumeration but not evaluation.
struct PiecewiseFn {
  Vars vars;
  std::vector<AffineForm> forms;
  std::vector<Branch> branches;
  std::vector<LinePolicy> policy;  // one per form
  std::vector<AffineForm> domain;
  Expr whole;  // source expression for DirectEval, may be null

  std::size_t dim() const { return vars.size(); }
  bool has_closures() const;
};

struct OneSidedLimits {
  double left = 0.0;
  double right = 0.0;
  double mid = 0.0;
  std::size_t axis = 0;
};

enum class ContinuityVerdict { Continuous, PiecewiseContinuous, NotPiecewiseContinuous };

struct FormContinuity {
  std::size_t form = 0;
  std::size_t samples = 0;
  std::size_t jumps = 0;
  double max_gap = 0.0;
  bool restriction_continuous = true;
};

struct ContinuityReport {
  std::vector<std::size_t> jump_forms;           // jump at every sample
  std::vector<std::size_t> indeterminate_forms;  // jump at some samples only
  std::vector<FormContinuity> per_form;
  ContinuityVerdict verdict = ContinuityVerdict::Continuous;
};

struct ProperReport {
  bool proper = false;
  ContinuityReport continuity;
  std::size_t checked_points = 0;
  double max_violation = 0.0;
  std::vector<std::size_t> violating_forms;
  bool axis_disagreement = false;
};

// A realized face of the arrangement: a sign pattern over `forms` (0 marks a
// point on that form) plus an interior representative point.
struct Face {
  std::vector<int> pattern;
  std::vector<double> point;
  bool open() const;
};

struct SamplingOptions {
  std::size_t per_form = 17;
  double box = 10.0;   // [-box, box]^d
  double delta = 1e-6; // exclusion radius around form intersections
};

// ---- construction ----
PiecewiseFn from_expression(const Expr& e, const Vars& vars);
PiecewiseFn from_expression(const std::string& text, const Vars& vars);
// `policy` may be empty (all BranchAssigned) or one entry per form.
PiecewiseFn from_branches(std::vector<AffineForm> forms, std::vector<Branch> table, const Vars& vars,
                          std::vector<LinePolicy> policy = {}, std::vector<AffineForm> domain = {});
std::vector<int> parse_pattern(const std::string& s);  // "+-0*" characters

// ---- queries ----
double evaluate(const PiecewiseFn& u, std::span<const double> p);
std::vector<int> sign_vector(const PiecewiseFn& u, std::span<const double> p);
bool on_form(const AffineForm& f, std::span<const double> p);
const Branch* find_branch(const PiecewiseFn& u, const std::vector<int>& pattern);
// Pattern of the face entered when moving from `pattern` along dir * e_axis.
std::vector<int> adjacent_pattern(const PiecewiseFn& u, const std::vector<int>& pattern, std::size_t axis,
                                  int dir);
// Symbolic-or-pointwise branch governing a (possibly on-line) pattern.
// `by_continuity` is set when leftover zero entries had to be resolved to +1.
Branch branch_for(const PiecewiseFn& u, const std::vector<int>& pattern, bool* by_continuity = nullptr);
// Value of the face with `pattern` at p (p lies on that face).
double face_value(const PiecewiseFn& u, const std::vector<int>& pattern, std::span<const double> p);

OneSidedLimits one_sided_limits(const PiecewiseFn& u, std::span<const double> p, std::size_t axis);
// Smallest axis with a nonzero coefficient.
std::size_t combining_axis(const AffineForm& f);
// A(left, right), or 0 when |left + right| <= tol_zero.
double proper_value(double left, double right);

std::vector<Face> enumerate_faces(const std::vector<AffineForm>& forms, const std::vector<AffineForm>& domain,
                                  std::size_t dim);
std::vector<Face> faces(const PiecewiseFn& u);
// Deterministic sample points on form k, away from other forms and inside the domain.
std::vector<std::vector<double>> line_samples(const PiecewiseFn& u, std::size_t k,
                                              const SamplingOptions& opt = {});

ContinuityReport classify_continuity(const PiecewiseFn& u, const SamplingOptions& opt = {});
ProperReport is_proper(const PiecewiseFn& u, const SamplingOptions& opt = {});

inline constexpr double kTolZero = 1e-9;
inline double tol_jump(double l, double r) { return 1e-9 * (1.0 + std::abs(l) + std::abs(r)); }

}  // namespace speculus

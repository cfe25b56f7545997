#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speculus/errors.hpp"

namespace speculus {

enum class Op : std::uint8_t {
  Const, Var, Add, Sub, Mul, Div, Pow, Neg,
  Abs, Sgn, Exp, Sqrt, Sin, Cos,
  Apply,  // opaque univariate function with a known derivative
};

struct Node;
using Expr = std::shared_ptr<const Node>;

// A univariate function known only pointwise, e.g. a quadrature-backed
// antiderivative. `derivative` is an expression in the single variable
// with index 0.
struct UnaryFn {
  std::string name;
  std::function<double(double)> value;
  Expr derivative;
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;     // Const
  int index = -1;         // Var: position in the owning variable list
  std::string name;       // Var
  int exponent = 0;       // Pow
  Expr lhs, rhs;          // unary ops use lhs only
  std::shared_ptr<const UnaryFn> fn;
};

using Vars = std::vector<std::string>;

// ---- construction (light constant folding, no general simplification) ----
Expr constant(double c);
Expr variable(const std::string& name, int index);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow_int(Expr a, int n);
Expr neg(Expr a);
Expr unary(Op op, Expr a);
Expr apply(std::shared_ptr<const UnaryFn> fn, Expr arg);

// ---- parsing / printing ----
Expr parse(const std::string& text, const Vars& vars);
std::string format(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

// ---- evaluation ----
double eval(const Expr& e, std::span<const double> values);
double eval(const Expr& e, const std::map<std::string, double>& bindings);

// ---- symbolic rules ----
Expr diff(const Expr& e, const std::string& var);
Expr diff(const Expr& e, int var_index);
// Replace variable i by repl[i] (null entries leave the variable alone).
Expr substitute(const Expr& e, const std::vector<Expr>& repl);
bool has_variables(const Expr& e);
bool has_singular_nodes(const Expr& e);  // abs or sgn anywhere

// Antiderivative in variable `var_index` for polynomials and exp/sin/cos of
// affine arguments (and linear combinations). nullopt when not covered.
std::optional<Expr> antiderivative(const Expr& e, int var_index);

// ---- affine singular structure ----

// l(x) = a . x - b
struct AffineForm {
  std::vector<double> a;
  double b = 0.0;

  double value(std::span<const double> p) const;
  std::size_t dim() const { return a.size(); }
  // First nonzero coefficient scaled to +1. `scale` receives the positive or
  // negative factor k with original = k * normalized.
  AffineForm normalized(double* scale = nullptr) const;
  bool same_as(const AffineForm& o) const;  // tolerant equality
  std::string str(const Vars& vars) const;
};

// Affine part of `e` in the variables of `vars`, or nullopt if not affine.
std::optional<AffineForm> as_affine(const Expr& e, std::size_t dim);
Expr to_expr(const AffineForm& f, const Vars& vars);

// Normalized, deduplicated forms under abs/sgn nodes, in first-seen order.
std::vector<AffineForm> affine_arguments(const Expr& e, std::size_t dim);

struct SignAssignment {
  AffineForm form;  // normalized
  int sign;         // -1 or +1
};

// Replace sgn(l) by its sign and abs(l) by sign*l. Throws UnassignedForm
// when an abs/sgn argument has no entry.
Expr pin_signs(const Expr& e, const std::vector<SignAssignment>& assignment);
// Same, but leaves unassigned abs/sgn nodes in place.
Expr pin_signs_partial(const Expr& e, const std::vector<SignAssignment>& assignment);

}  // namespace speculus

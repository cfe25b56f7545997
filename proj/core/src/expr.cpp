#include "speculus/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>

namespace speculus {

namespace {

std::shared_ptr<Node> raw(Op op, Expr l = nullptr, Expr r = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

bool is_const(const Expr& e, double* v = nullptr) {
  if (e->op != Op::Const) return false;
  if (v) *v = e->value;
  return true;
}

bool is_value(const Expr& e, double c) { return e->op == Op::Const && e->value == c; }

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

Expr constant(double c) {
  auto n = raw(Op::Const);
  n->value = c;
  return n;
}

Expr variable(const std::string& name, int index) {
  auto n = raw(Op::Var);
  n->name = name;
  n->index = index;
  return n;
}

Expr add(Expr a, Expr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return constant(x + y);
  if (is_value(a, 0.0)) return b;
  if (is_value(b, 0.0)) return a;
  return raw(Op::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return constant(x - y);
  if (is_value(b, 0.0)) return a;
  if (is_value(a, 0.0)) return neg(std::move(b));
  return raw(Op::Sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return constant(x * y);
  if (is_value(a, 0.0) || is_value(b, 0.0)) return constant(0.0);
  if (is_value(a, 1.0)) return b;
  if (is_value(b, 1.0)) return a;
  if (is_value(a, -1.0)) return neg(std::move(b));
  if (is_value(b, -1.0)) return neg(std::move(a));
  return raw(Op::Mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y) && y != 0.0) return constant(x / y);
  if (is_value(b, 1.0)) return a;
  if (is_value(a, 0.0) && !is_value(b, 0.0)) return constant(0.0);
  return raw(Op::Div, std::move(a), std::move(b));
}

Expr pow_int(Expr a, int n) {
  if (n == 0) return constant(1.0);
  if (n == 1) return a;
  double x;
  if (is_const(a, &x)) return constant(std::pow(x, n));
  auto p = raw(Op::Pow, std::move(a));
  p->exponent = n;
  return p;
}

Expr neg(Expr a) {
  double x;
  if (is_const(a, &x)) return constant(-x);
  if (a->op == Op::Neg) return a->lhs;
  return raw(Op::Neg, std::move(a));
}

Expr unary(Op op, Expr a) {
  double x;
  if (is_const(a, &x)) {
    switch (op) {
      case Op::Abs: return constant(std::fabs(x));
      case Op::Sgn: return constant(sgn(x));
      case Op::Exp: return constant(std::exp(x));
      case Op::Sin: return constant(std::sin(x));
      case Op::Cos: return constant(std::cos(x));
      case Op::Sqrt:
        if (x >= 0) return constant(std::sqrt(x));
        break;
      default: break;
    }
  }
  return raw(op, std::move(a));
}

Expr apply(std::shared_ptr<const UnaryFn> fn, Expr arg) {
  auto n = raw(Op::Apply, std::move(arg));
  n->fn = std::move(fn);
  return n;
}

// ------------------------------------------------------------------ parser

namespace {

struct Parser {
  const std::string& s;
  const Vars& vars;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError("syntax error: " + msg, pos); }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (eat('+')) lhs = raw(Op::Add, lhs, term());
      else if (eat('-')) lhs = raw(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (eat('*')) lhs = raw(Op::Mul, lhs, factor());
      else if (eat('/')) lhs = raw(Op::Div, lhs, factor());
      else return lhs;
    }
  }

  // '^' binds tighter than a unary minus written outside it: -x^2 = -(x^2).
  Expr factor() {
    skip();
    if (pos < s.size() && s[pos] == '-') {
      ++pos;
      return raw(Op::Neg, factor());
    }
    Expr b = base();
    if (eat('^')) {
      skip();
      std::size_t start = pos;
      if (pos < s.size() && (s[pos] == '-' || s[pos] == '+'))
        throw BadExponent("exponent must be a non-negative integer", start);
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == start) {
        if (pos < s.size() && (s[pos] == '(' || s[pos] == '.' || std::isalpha(static_cast<unsigned char>(s[pos]))))
          throw BadExponent("exponent must be a non-negative integer", start);
        fail("expected exponent");
      }
      if (pos < s.size() && (s[pos] == '.' || s[pos] == 'e' || s[pos] == 'E'))
        throw BadExponent("exponent must be a non-negative integer", start);
      int n = 0;
      auto [p, ec] = std::from_chars(s.data() + start, s.data() + pos, n);
      if (ec != std::errc()) throw BadExponent("exponent out of range", start);
      auto node = raw(Op::Pow, b);
      node->exponent = n;
      return node;
    }
    return b;
  }

  Expr base() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    if (c == '(') {
      ++pos;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      std::size_t save = pos++;
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
      if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      } else {
        pos = save;
      }
    }
    double v = 0;
    auto [p, ec] = std::from_chars(s.data() + start, s.data() + pos, v);
    if (ec != std::errc() || p != s.data() + pos) {
      pos = start;
      fail("malformed number");
    }
    auto n = raw(Op::Const);
    n->value = v;
    return n;
  }

  Expr ident() {
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
    std::string id = s.substr(start, pos - start);
    static const std::pair<const char*, Op> funcs[] = {
        {"abs", Op::Abs}, {"sgn", Op::Sgn}, {"exp", Op::Exp}, {"sqrt", Op::Sqrt},
        {"sin", Op::Sin}, {"cos", Op::Cos}};
    auto var = std::find(vars.begin(), vars.end(), id);
    if (var != vars.end()) {
      auto n = raw(Op::Var);
      n->name = id;
      n->index = static_cast<int>(var - vars.begin());
      return n;
    }
    bool is_elu = id == "elu";
    const Op* fop = nullptr;
    for (auto& [name, op] : funcs)
      if (id == name) fop = &op;
    if (!fop && !is_elu) throw UnknownIdentifier("unknown identifier '" + id + "'", start);
    if (!eat('(')) fail("expected '(' after " + id);
    Expr arg = expr();
    if (!eat(')')) fail("expected ')'");
    if (fop) return raw(*fop, arg);
    // elu(g) = g*(1+sgn(g))/2 + (exp(g)-1)*(1-sgn(g))/2
    auto two = raw(Op::Const);
    two->value = 2;
    auto one = raw(Op::Const);
    one->value = 1;
    auto pos_part = raw(Op::Div, raw(Op::Mul, arg, raw(Op::Add, one, raw(Op::Sgn, arg))), two);
    auto neg_part = raw(Op::Div,
                        raw(Op::Mul, raw(Op::Sub, raw(Op::Exp, arg), one), raw(Op::Sub, one, raw(Op::Sgn, arg))),
                        two);
    return raw(Op::Add, pos_part, neg_part);
  }
};

}  // namespace

Expr parse(const std::string& text, const Vars& vars) {
  Parser p{text, vars};
  Expr e = p.expr();
  p.skip();
  if (p.pos != text.size()) {
    if (text[p.pos] == ')') p.fail("unbalanced ')'");
    p.fail(std::string("unexpected character '") + text[p.pos] + "'");
  }
  return e;
}

// --------------------------------------------------------------- printing

namespace {

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

int prec(const Expr& e) {
  switch (e->op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const: return std::signbit(e->value) ? 3 : 5;
    default: return 5;
  }
}

const char* fname(Op op) {
  switch (op) {
    case Op::Abs: return "abs";
    case Op::Sgn: return "sgn";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    default: return "?";
  }
}

std::string wrap(const Expr& e, int need) {
  std::string s = format(e);
  return prec(e) < need ? "(" + s + ")" : s;
}

}  // namespace

std::string format(const Expr& e) {
  switch (e->op) {
    case Op::Const:
      if (std::signbit(e->value)) return "-" + num(-e->value);
      return num(e->value);
    case Op::Var: return e->name;
    case Op::Add: return wrap(e->lhs, 1) + " + " + wrap(e->rhs, 2);
    case Op::Sub: return wrap(e->lhs, 1) + " - " + wrap(e->rhs, 2);
    case Op::Mul: return wrap(e->lhs, 2) + "*" + wrap(e->rhs, 3);
    case Op::Div: return wrap(e->lhs, 2) + "/" + wrap(e->rhs, 3);
    case Op::Neg: return "-" + wrap(e->lhs, 3);
    case Op::Pow: return wrap(e->lhs, 5) + "^" + std::to_string(e->exponent);
    case Op::Apply: return e->fn->name + "(" + format(e->lhs) + ")";
    default: return std::string(fname(e->op)) + "(" + format(e->lhs) + ")";
  }
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Const: return a->value == b->value;
    case Op::Var: return a->name == b->name;
    case Op::Pow:
      return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
    case Op::Apply: return a->fn == b->fn && structurally_equal(a->lhs, b->lhs);
    default:
      return structurally_equal(a->lhs, b->lhs) &&
             (a->rhs == nullptr ? b->rhs == nullptr : structurally_equal(a->rhs, b->rhs));
  }
}

// ------------------------------------------------------------- evaluation

namespace {

template <class Lookup>
double ev(const Node& n, const Lookup& var) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return var(n);
    case Op::Add: return ev(*n.lhs, var) + ev(*n.rhs, var);
    case Op::Sub: return ev(*n.lhs, var) - ev(*n.rhs, var);
    case Op::Mul: return ev(*n.lhs, var) * ev(*n.rhs, var);
    case Op::Div: {
      double d = ev(*n.rhs, var);
      if (d == 0.0) throw DomainError("division by zero");
      return ev(*n.lhs, var) / d;
    }
    case Op::Pow: {
      double b = ev(*n.lhs, var), r = 1.0;
      for (int k = 0; k < n.exponent; ++k) r *= b;
      return r;
    }
    case Op::Neg: return -ev(*n.lhs, var);
    case Op::Abs: return std::fabs(ev(*n.lhs, var));
    case Op::Sgn: return sgn(ev(*n.lhs, var));
    case Op::Exp: return std::exp(ev(*n.lhs, var));
    case Op::Sqrt: {
      double v = ev(*n.lhs, var);
      if (v < 0) throw DomainError("sqrt of negative value");
      return std::sqrt(v);
    }
    case Op::Sin: return std::sin(ev(*n.lhs, var));
    case Op::Cos: return std::cos(ev(*n.lhs, var));
    case Op::Apply: return n.fn->value(ev(*n.lhs, var));
  }
  return 0.0;
}

}  // namespace

double eval(const Expr& e, std::span<const double> values) {
  return ev(*e, [&](const Node& n) {
    if (n.index < 0 || static_cast<std::size_t>(n.index) >= values.size())
      throw DomainError("unbound variable '" + n.name + "'");
    return values[n.index];
  });
}

double eval(const Expr& e, const std::map<std::string, double>& bindings) {
  return ev(*e, [&](const Node& n) {
    auto it = bindings.find(n.name);
    if (it == bindings.end()) throw DomainError("unbound variable '" + n.name + "'");
    return it->second;
  });
}

// ---------------------------------------------------------- differentiation

namespace {

template <class Match>
Expr d(const Expr& e, const Match& match) {
  switch (e->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(match(*e) ? 1.0 : 0.0);
    case Op::Add: return add(d(e->lhs, match), d(e->rhs, match));
    case Op::Sub: return sub(d(e->lhs, match), d(e->rhs, match));
    case Op::Mul:
      return add(mul(d(e->lhs, match), e->rhs), mul(e->lhs, d(e->rhs, match)));
    case Op::Div: {
      Expr da = d(e->lhs, match), db = d(e->rhs, match);
      if (is_value(db, 0.0)) return div(da, e->rhs);
      return div(sub(mul(da, e->rhs), mul(e->lhs, db)), pow_int(e->rhs, 2));
    }
    case Op::Pow:
      return mul(mul(constant(e->exponent), pow_int(e->lhs, e->exponent - 1)), d(e->lhs, match));
    case Op::Neg: return neg(d(e->lhs, match));
    case Op::Abs: return mul(unary(Op::Sgn, e->lhs), d(e->lhs, match));
    case Op::Sgn: return constant(0.0);
    case Op::Exp: return mul(e, d(e->lhs, match));
    case Op::Sqrt: return div(d(e->lhs, match), mul(constant(2.0), e));
    case Op::Sin: return mul(unary(Op::Cos, e->lhs), d(e->lhs, match));
    case Op::Cos: return neg(mul(unary(Op::Sin, e->lhs), d(e->lhs, match)));
    case Op::Apply: {
      Expr inner = d(e->lhs, match);
      if (is_value(inner, 0.0)) return inner;
      return mul(substitute(e->fn->derivative, {e->lhs}), inner);
    }
  }
  return constant(0.0);
}

}  // namespace

Expr diff(const Expr& e, const std::string& var) {
  return d(e, [&](const Node& n) { return n.name == var; });
}

Expr diff(const Expr& e, int var_index) {
  return d(e, [&](const Node& n) { return n.index == var_index; });
}

Expr substitute(const Expr& e, const std::vector<Expr>& repl) {
  switch (e->op) {
    case Op::Const: return e;
    case Op::Var:
      if (e->index >= 0 && static_cast<std::size_t>(e->index) < repl.size() && repl[e->index])
        return repl[e->index];
      return e;
    case Op::Add: return add(substitute(e->lhs, repl), substitute(e->rhs, repl));
    case Op::Sub: return sub(substitute(e->lhs, repl), substitute(e->rhs, repl));
    case Op::Mul: return mul(substitute(e->lhs, repl), substitute(e->rhs, repl));
    case Op::Div: return div(substitute(e->lhs, repl), substitute(e->rhs, repl));
    case Op::Pow: return pow_int(substitute(e->lhs, repl), e->exponent);
    case Op::Neg: return neg(substitute(e->lhs, repl));
    case Op::Apply: return apply(e->fn, substitute(e->lhs, repl));
    default: return unary(e->op, substitute(e->lhs, repl));
  }
}

bool has_variables(const Expr& e) {
  if (e->op == Op::Var) return true;
  if (e->lhs && has_variables(e->lhs)) return true;
  return e->rhs && has_variables(e->rhs);
}

bool has_singular_nodes(const Expr& e) {
  if (e->op == Op::Abs || e->op == Op::Sgn) return true;
  if (e->lhs && has_singular_nodes(e->lhs)) return true;
  return e->rhs && has_singular_nodes(e->rhs);
}

// ------------------------------------------------------------ antiderivative

namespace {

bool depends_on(const Expr& e, int v) {
  if (e->op == Op::Var) return e->index == v;
  if (e->lhs && depends_on(e->lhs, v)) return true;
  return e->rhs && depends_on(e->rhs, v);
}

using Poly = std::vector<double>;  // coefficients, lowest degree first

std::optional<Poly> to_poly(const Expr& e, int v) {
  if (!depends_on(e, v)) {
    if (has_variables(e)) return std::nullopt;
    try {
      return Poly{eval(e, std::span<const double>{})};
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }
  auto combine = [](const Poly& a, const Poly& b, double sb) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += sb * b[i];
    return r;
  };
  auto times = [](const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  switch (e->op) {
    case Op::Var: return Poly{0.0, 1.0};
    case Op::Add:
    case Op::Sub: {
      auto a = to_poly(e->lhs, v), b = to_poly(e->rhs, v);
      if (!a || !b) return std::nullopt;
      return combine(*a, *b, e->op == Op::Add ? 1.0 : -1.0);
    }
    case Op::Neg: {
      auto a = to_poly(e->lhs, v);
      if (!a) return std::nullopt;
      for (auto& c : *a) c = -c;
      return a;
    }
    case Op::Mul: {
      auto a = to_poly(e->lhs, v), b = to_poly(e->rhs, v);
      if (!a || !b) return std::nullopt;
      return times(*a, *b);
    }
    case Op::Div: {
      auto a = to_poly(e->lhs, v), b = to_poly(e->rhs, v);
      if (!a || !b || b->size() != 1 || (*b)[0] == 0.0) return std::nullopt;
      for (auto& c : *a) c /= (*b)[0];
      return a;
    }
    case Op::Pow: {
      auto a = to_poly(e->lhs, v);
      if (!a) return std::nullopt;
      Poly r{1.0};
      for (int k = 0; k < e->exponent; ++k) r = times(r, *a);
      return r;
    }
    default: return std::nullopt;
  }
}

Expr from_poly(const Poly& p, const Expr& x) {
  Expr r = constant(0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    r = add(r, mul(constant(p[k]), pow_int(x, static_cast<int>(k))));
  }
  return r;
}

Expr find_var(const Expr& e, int v) {
  if (e->op == Op::Var && e->index == v) return e;
  if (e->lhs)
    if (auto r = find_var(e->lhs, v)) return r;
  if (e->rhs)
    if (auto r = find_var(e->rhs, v)) return r;
  return nullptr;
}

std::optional<Expr> anti(const Expr& e, int v, const Expr& x) {
  if (auto p = to_poly(e, v)) {
    Poly q(p->size() + 1, 0.0);
    for (std::size_t k = 0; k < p->size(); ++k) q[k + 1] = (*p)[k] / static_cast<double>(k + 1);
    return from_poly(q, x);
  }
  switch (e->op) {
    case Op::Add:
    case Op::Sub: {
      auto a = anti(e->lhs, v, x), b = anti(e->rhs, v, x);
      if (!a || !b) return std::nullopt;
      return e->op == Op::Add ? add(*a, *b) : sub(*a, *b);
    }
    case Op::Neg: {
      auto a = anti(e->lhs, v, x);
      if (!a) return std::nullopt;
      return neg(*a);
    }
    case Op::Mul: {
      auto cl = to_poly(e->lhs, v), cr = to_poly(e->rhs, v);
      if (cl && cl->size() == 1) {
        auto a = anti(e->rhs, v, x);
        if (a) return mul(constant((*cl)[0]), *a);
      }
      if (cr && cr->size() == 1) {
        auto a = anti(e->lhs, v, x);
        if (a) return mul(*a, constant((*cr)[0]));
      }
      return std::nullopt;
    }
    case Op::Div: {
      auto c = to_poly(e->rhs, v);
      if (!c || c->size() != 1 || (*c)[0] == 0.0) return std::nullopt;
      auto a = anti(e->lhs, v, x);
      if (!a) return std::nullopt;
      return div(*a, constant((*c)[0]));
    }
    case Op::Exp:
    case Op::Sin:
    case Op::Cos: {
      auto g = to_poly(e->lhs, v);
      if (!g || g->size() != 2 || (*g)[1] == 0.0) return std::nullopt;
      double k = (*g)[1];
      if (e->op == Op::Exp) return div(e, constant(k));
      if (e->op == Op::Sin) return div(neg(unary(Op::Cos, e->lhs)), constant(k));
      return div(unary(Op::Sin, e->lhs), constant(k));
    }
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<Expr> antiderivative(const Expr& e, int var_index) {
  Expr x = find_var(e, var_index);
  if (!x) x = variable("x", var_index);
  return anti(e, var_index, x);
}

// ------------------------------------------------------------ affine forms

double AffineForm::value(std::span<const double> p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * p[i];
  return s - b;
}

AffineForm AffineForm::normalized(double* scale) const {
  double k = 0.0;
  for (double c : a)
    if (c != 0.0) {
      k = c;
      break;
    }
  if (k == 0.0) throw NonAffineSingularity("affine form has all-zero coefficients");
  AffineForm r;
  r.a.reserve(a.size());
  for (double c : a) r.a.push_back(c / k);
  r.b = b / k;
  if (scale) *scale = k;
  return r;
}

bool AffineForm::same_as(const AffineForm& o) const {
  if (a.size() != o.a.size()) return false;
  auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-12 * (1.0 + std::fabs(x) + std::fabs(y)); };
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], o.a[i])) return false;
  return close(b, o.b);
}

std::string AffineForm::str(const Vars& vars) const {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double c = a[i];
    if (c == 0.0) continue;
    std::string name = i < vars.size() ? vars[i] : "x" + std::to_string(i);
    if (s.empty()) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    double m = std::fabs(c);
    if (m != 1.0) s += num(m) + "*";
    s += name;
  }
  if (b != 0.0) s += (b > 0 ? " - " : " + ") + num(std::fabs(b));
  return s;
}

namespace {

struct Lin {
  std::vector<double> a;
  double c = 0.0;
  bool constant_only() const {
    return std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
  }
};

std::optional<Lin> lin(const Expr& e, std::size_t dim) {
  switch (e->op) {
    case Op::Const: return Lin{std::vector<double>(dim, 0.0), e->value};
    case Op::Var: {
      if (e->index < 0 || static_cast<std::size_t>(e->index) >= dim) return std::nullopt;
      Lin l{std::vector<double>(dim, 0.0), 0.0};
      l.a[e->index] = 1.0;
      return l;
    }
    case Op::Add:
    case Op::Sub: {
      auto x = lin(e->lhs, dim), y = lin(e->rhs, dim);
      if (!x || !y) return std::nullopt;
      double s = e->op == Op::Add ? 1.0 : -1.0;
      for (std::size_t i = 0; i < dim; ++i) x->a[i] += s * y->a[i];
      x->c += s * y->c;
      return x;
    }
    case Op::Neg: {
      auto x = lin(e->lhs, dim);
      if (!x) return std::nullopt;
      for (auto& v : x->a) v = -v;
      x->c = -x->c;
      return x;
    }
    case Op::Mul: {
      auto x = lin(e->lhs, dim), y = lin(e->rhs, dim);
      if (!x || !y) return std::nullopt;
      if (!x->constant_only() && !y->constant_only()) return std::nullopt;
      if (!x->constant_only()) std::swap(x, y);
      for (auto& v : y->a) v *= x->c;
      y->c *= x->c;
      return y;
    }
    case Op::Div: {
      auto x = lin(e->lhs, dim), y = lin(e->rhs, dim);
      if (!x || !y || !y->constant_only() || y->c == 0.0) return std::nullopt;
      for (auto& v : x->a) v /= y->c;
      x->c /= y->c;
      return x;
    }
    case Op::Pow: {
      if (e->exponent == 0) return Lin{std::vector<double>(dim, 0.0), 1.0};
      auto x = lin(e->lhs, dim);
      if (!x) return std::nullopt;
      if (e->exponent == 1) return x;
      if (!x->constant_only()) return std::nullopt;
      return Lin{std::vector<double>(dim, 0.0), std::pow(x->c, e->exponent)};
    }
    default: {
      if (has_variables(e)) return std::nullopt;
      try {
        return Lin{std::vector<double>(dim, 0.0), eval(e, std::span<const double>{})};
      } catch (const DomainError&) {
        return std::nullopt;
      }
    }
  }
}

}  // namespace

std::optional<AffineForm> as_affine(const Expr& e, std::size_t dim) {
  auto l = lin(e, dim);
  if (!l) return std::nullopt;
  return AffineForm{l->a, -l->c};
}

Expr to_expr(const AffineForm& f, const Vars& vars) {
  Expr r = constant(0.0);
  for (std::size_t i = 0; i < f.a.size(); ++i)
    if (f.a[i] != 0.0) r = add(r, mul(constant(f.a[i]), variable(vars[i], static_cast<int>(i))));
  return sub(r, constant(f.b));
}

namespace {

void collect_forms(const Expr& e, std::size_t dim, std::vector<AffineForm>& out) {
  if (e->op == Op::Abs || e->op == Op::Sgn) {
    auto f = as_affine(e->lhs, dim);
    if (!f) throw NonAffineSingularity("argument of " + std::string(fname(e->op)) + " is not affine: " + format(e->lhs));
    bool constant_arg = std::all_of(f->a.begin(), f->a.end(), [](double v) { return v == 0.0; });
    if (!constant_arg) {
      AffineForm n = f->normalized();
      bool seen = std::any_of(out.begin(), out.end(), [&](const AffineForm& g) { return g.same_as(n); });
      if (!seen) out.push_back(n);
    }
    return;
  }
  if (e->lhs) collect_forms(e->lhs, dim, out);
  if (e->rhs) collect_forms(e->rhs, dim, out);
}

std::size_t max_dim(const Expr& e) {
  std::size_t m = e->op == Op::Var ? static_cast<std::size_t>(e->index + 1) : 0;
  if (e->lhs) m = std::max(m, max_dim(e->lhs));
  if (e->rhs) m = std::max(m, max_dim(e->rhs));
  return m;
}

Expr pin(const Expr& e, const std::vector<SignAssignment>& asg, bool strict, std::size_t dim) {
  if (e->op == Op::Abs || e->op == Op::Sgn) {
    auto f = as_affine(e->lhs, dim);
    if (!f) throw NonAffineSingularity("argument of " + std::string(fname(e->op)) + " is not affine: " + format(e->lhs));
    if (std::all_of(f->a.begin(), f->a.end(), [](double v) { return v == 0.0; })) return e;
    double k = 1.0;
    AffineForm n = f->normalized(&k);
    auto it = std::find_if(asg.begin(), asg.end(), [&](const SignAssignment& s) { return s.form.same_as(n); });
    if (it == asg.end()) {
      if (strict) throw UnassignedForm("no sign assigned to form " + format(e->lhs));
      return e;
    }
    double s = (k > 0 ? 1.0 : -1.0) * it->sign;
    if (e->op == Op::Sgn) return constant(s);
    return mul(constant(s), e->lhs);
  }
  switch (e->op) {
    case Op::Const:
    case Op::Var: return e;
    case Op::Add: return add(pin(e->lhs, asg, strict, dim), pin(e->rhs, asg, strict, dim));
    case Op::Sub: return sub(pin(e->lhs, asg, strict, dim), pin(e->rhs, asg, strict, dim));
    case Op::Mul: return mul(pin(e->lhs, asg, strict, dim), pin(e->rhs, asg, strict, dim));
    case Op::Div: return div(pin(e->lhs, asg, strict, dim), pin(e->rhs, asg, strict, dim));
    case Op::Pow: return pow_int(pin(e->lhs, asg, strict, dim), e->exponent);
    case Op::Neg: return neg(pin(e->lhs, asg, strict, dim));
    case Op::Apply: return apply(e->fn, pin(e->lhs, asg, strict, dim));
    default: return unary(e->op, pin(e->lhs, asg, strict, dim));
  }
}

}  // namespace

std::vector<AffineForm> affine_arguments(const Expr& e, std::size_t dim) {
  std::vector<AffineForm> out;
  collect_forms(e, dim, out);
  return out;
}

Expr pin_signs(const Expr& e, const std::vector<SignAssignment>& assignment) {
  std::size_t dim = max_dim(e);
  for (auto& s : assignment) dim = std::max(dim, s.form.dim());
  return pin(e, assignment, true, dim);
}

Expr pin_signs_partial(const Expr& e, const std::vector<SignAssignment>& assignment) {
  std::size_t dim = max_dim(e);
  for (auto& s : assignment) dim = std::max(dim, s.form.dim());
  return pin(e, assignment, false, dim);
}

}  // namespace speculus

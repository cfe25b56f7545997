#include "problem.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace speculus::cli {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct Line {
  std::size_t number;
  std::size_t offset;
};

[[noreturn]] void fail(const Line& at, const std::string& what) {
  throw ParseError("line " + std::to_string(at.number) + ": " + what, at.offset);
}

double number(const std::string& s, const Line& at) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(at, "bad number '" + s + "'");
  return v;
}

int integer(const std::string& s, const Line& at) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || v < 2) fail(at, "bad point count '" + s + "'");
  return v;
}

void range(const std::string& s, double& a, double& b, const Line& at) {
  auto parts = split(s, ',');
  if (parts.size() != 2) fail(at, "range needs two numbers");
  a = number(parts[0], at);
  b = number(parts[1], at);
  if (!(b > a)) fail(at, "empty range");
}

// Keys shared by [function] and the per-function keys of [problem].
void function_key(FunctionSpec& f, const std::string& key, const std::string& value, const Line& at) {
  if (key.empty() || key == "expr") {
    f.expr = value;
  } else if (key == "forms") {
    f.forms = split(value, ';');
  } else if (key.rfind("branch.", 0) == 0) {
    f.branches.emplace_back(key.substr(7), value);
  } else if (key == "domain") {
    f.domain = split(value, ';');
  } else if (key == "online") {
    if (value != "specular" && value != "branch" && value != "direct") fail(at, "unknown on-line policy '" + value + "'");
    f.online = value;
  } else if (key == "vars") {
    f.vars = split(value, ',');
  } else {
    fail(at, "unknown key '" + key + "'");
  }
}

Vars default_vars(const std::string& name) {
  if (name == "f") return {"x", "t"};
  return {"x"};
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  ProblemFile pf;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  Line at{0, 0};
  std::size_t next_offset = 0;
  while (std::getline(in, raw)) {
    at.number += 1;
    at.offset = next_offset;
    next_offset += raw.size() + 1;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(at, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "grid" && section != "check" && section != "function")
        fail(at, "unknown section [" + section + "]");
      if (section == "function" && !pf.function) pf.function = FunctionSpec{};
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(at, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (section.empty()) fail(at, "key outside a section");
    if (section == "problem") {
      if (key == "kind") {
        if (value != "transport" && value != "wave" && value != "wave-halfline" && value != "wave-nonhomogeneous")
          fail(at, "unknown problem kind '" + value + "'");
        pf.kind = value;
        continue;
      }
      auto dot = key.find('.');
      std::string name = key.substr(0, dot);
      if (name != "phi" && name != "psi" && name != "h" && name != "f") fail(at, "unknown key '" + key + "'");
      auto& spec = pf.data[name];
      if (spec.vars.empty()) spec.vars = default_vars(name);
      function_key(spec, dot == std::string::npos ? "" : key.substr(dot + 1), value, at);
    } else if (section == "grid") {
      if (key == "x-range") range(value, pf.grid.x0, pf.grid.x1, at);
      else if (key == "t-range") range(value, pf.grid.t0, pf.grid.t1, at);
      else if (key == "nx") pf.grid.nx = integer(value, at);
      else if (key == "nt") pf.grid.nt = integer(value, at);
      else if (key == "delta") pf.grid.delta = number(value, at);
      else fail(at, "unknown key '" + key + "'");
    } else if (section == "check") {
      if (key != "checks") fail(at, "unknown key '" + key + "'");
      for (auto& c : split(value, ',')) {
        if (c != "residual" && c != "s2" && c != "proper" && c != "hypothesis-h" && c != "boundary" && c != "initial")
          fail(at, "unknown check '" + c + "'");
        pf.checks.push_back(c);
      }
    } else {
      if (pf.function->vars.empty()) pf.function->vars = {"x", "y"};
      function_key(*pf.function, key, value, at);
    }
  }

  auto require = [&](const char* name) {
    auto it = pf.data.find(name);
    if (it == pf.data.end() || it->second.empty())
      throw ParseError(std::string("problem kind '") + pf.kind + "' needs '" + name + "'", text.size());
  };
  if (pf.kind == "transport") require("h");
  if (pf.kind == "wave" || pf.kind == "wave-halfline" || pf.kind == "wave-nonhomogeneous") {
    require("phi");
    require("psi");
  }
  if (pf.kind == "wave-nonhomogeneous") require("f");
  if (pf.kind.empty() && !pf.function && !pf.data.empty())
    throw ParseError("[problem] has no kind", text.size());
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

namespace {

AffineForm affine(const std::string& text, const Vars& vars) {
  auto f = as_affine(parse(text, vars), vars.size());
  if (!f) throw ParseError("'" + text + "' is not affine", 0);
  return *f;
}

}  // namespace

PiecewiseFn build_function(const FunctionSpec& spec) {
  const Vars& vars = spec.vars;
  if (!spec.expr.empty()) {
    PiecewiseFn u = from_expression(parse(spec.expr, vars), vars);
    if (spec.online == "specular") u.policy.assign(u.forms.size(), LinePolicy::SpecularCombination);
    for (const auto& d : spec.domain) u.domain.push_back(affine(d, vars));
    return u;
  }
  std::vector<AffineForm> forms, domain;
  for (const auto& f : spec.forms) forms.push_back(affine(f, vars));
  for (const auto& d : spec.domain) domain.push_back(affine(d, vars));
  std::vector<Branch> table;
  for (const auto& [pattern, expr] : spec.branches) {
    std::vector<int> p = pattern == "*" ? std::vector<int>{} : parse_pattern(pattern);
    table.push_back(Branch{p, parse(expr, vars), {}});
  }
  LinePolicy pol = spec.online == "specular" ? LinePolicy::SpecularCombination : LinePolicy::BranchAssigned;
  return from_branches(forms, table, vars, std::vector<LinePolicy>(forms.size(), pol), domain);
}

}  // namespace speculus::cli

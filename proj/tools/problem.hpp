#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speculus/piecewise.hpp"

namespace speculus::cli {

// One function as written in a problem file: either `expr`, or an explicit
// table of forms and first-match branches.
struct FunctionSpec {
  std::string expr;
  std::vector<std::string> forms;
  std::vector<std::pair<std::string, std::string>> branches;  // (pattern, expr) in file order
  std::vector<std::string> domain;
  std::string online;  // specular | branch | direct; empty means default
  Vars vars;

  bool empty() const { return expr.empty() && branches.empty(); }
};

struct Grid {
  double x0 = -2.0, x1 = 2.0;
  double t0 = 0.0, t1 = 2.0;
  int nx = 41, nt = 41;
  double delta = 1e-6;
};

struct ProblemFile {
  std::string kind;  // transport | wave | wave-halfline | wave-nonhomogeneous
  std::map<std::string, FunctionSpec> data;  // phi, psi, h, f
  std::optional<FunctionSpec> function;      // [function] section
  Grid grid;
  std::vector<std::string> checks;
};

// Throws ParseError with a "line N" message on malformed input.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);

PiecewiseFn build_function(const FunctionSpec& spec);

}  // namespace speculus::cli

#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "problem.hpp"
#include "speculus/waves.hpp"

namespace speculus::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kParseError = 2,
  kDomainError = 3,
  kPrecondition = 4,
};

int exit_code_for(const std::exception& e);

// %.17g, with -0 printed as 0.
std::string num(double v);

SolutionField solve_problem(const ProblemFile& pf);

int cmd_deriv(const ProblemFile& pf, const std::vector<double>& point, const std::string& axis, std::ostream& out);
int cmd_solve(const ProblemFile& pf, std::ostream& csv, std::ostream& out, std::ostream& err);
int cmd_check(const ProblemFile& pf, std::ostream& out);

}  // namespace speculus::cli

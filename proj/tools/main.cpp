#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace speculus::cli;

int main(int argc, char** argv) {
  CLI::App app{"speculus: specular derivatives and wave-equation solvers"};
  app.require_subcommand(1);

  std::string file, out_path, axis = "x";
  std::vector<double> point;

  auto* deriv = app.add_subcommand("deriv", "Semi-derivatives, specular derivative and tangent geometry at a point");
  deriv->add_option("file", file, "Problem file with a [function] section")->required();
  deriv->add_option("--point", point, "Point, e.g. 3,6")->required()->delimiter(',');
  deriv->add_option("--axis", axis, "x, y or t")->check(CLI::IsMember({"x", "y", "t"}));

  auto* solve = app.add_subcommand("solve", "Solve the problem and export a sampled CSV");
  solve->add_option("file", file, "Problem file")->required();
  solve->add_option("--out", out_path, "Output CSV path")->required();

  auto* check = app.add_subcommand("check", "Run the checks listed in the problem file");
  check->add_option("file", file, "Problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kParseError;
  }

  try {
    ProblemFile pf = load_problem(file);
    if (*deriv) return cmd_deriv(pf, point, axis, std::cout);
    if (*solve) {
      std::ofstream csv(out_path, std::ios::binary);
      if (!csv) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kDomainError;
      }
      return cmd_solve(pf, csv, std::cout, std::cerr);
    }
    return cmd_check(pf, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace speculus {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grammar violation. `offset` is the byte offset into the source text.
struct ParseError : Error {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t off)
      : Error(what + " at offset " + std::to_string(off)), offset(off) {}
};

struct UnknownIdentifier : ParseError {
  using ParseError::ParseError;
};

struct BadExponent : ParseError {
  using ParseError::ParseError;
};

// Division by zero, sqrt of a negative, or a non-finite intermediate.
struct DomainError : Error {
  using Error::Error;
};

struct NonAffineSingularity : Error {
  using Error::Error;
};

struct UnassignedForm : Error {
  using Error::Error;
};

struct BranchLookupError : Error {
  using Error::Error;
};

struct CoverageGap : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct CenterMismatch : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  double worst_a, worst_b;
  QuadratureError(const std::string& what, double a, double b)
      : Error(what), worst_a(a), worst_b(b) {}
};

struct SolverPrecondition : Error {
  using Error::Error;
};

}  // namespace speculus

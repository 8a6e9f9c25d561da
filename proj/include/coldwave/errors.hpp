#pragma once
#include <stdexcept>
#include <string>

namespace coldwave {

// All recoverable failures are typed; the CLI maps them to exit codes
// (validation -> 2, numerical -> 3).

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoBracketingRoots : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoleCrossing : std::runtime_error {
  double theta;
  explicit PoleCrossing(double th, const std::string& msg)
      : std::runtime_error(msg), theta(th) {}
};

struct StepSizeUnderflow : std::runtime_error {
  double theta;
  explicit StepSizeUnderflow(double th, const std::string& msg)
      : std::runtime_error(msg), theta(th) {}
};

struct CFLViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientCoverage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coldwave

#pragma once

#include <stdexcept>
#include <string>

namespace monodromy {

// Three failure classes, mirrored by the CLI exit codes 1, 2 and 3.

/// Malformed or out-of-range input (bad dimensions, unknown names, indices).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A path runs into (or numerically onto) the singular divisor.
class DivisorContactError : public NumericalError {
 public:
  DivisorContactError(const std::string& what, double closest_approach)
      : NumericalError(what), closest_approach_(closest_approach) {}
  double closest_approach() const noexcept { return closest_approach_; }

 private:
  double closest_approach_;
};

/// Adaptive step control could not meet the tolerance.
class StepUnderflowError : public NumericalError {
 public:
  StepUnderflowError(const std::string& what, double closest_approach)
      : NumericalError(what), closest_approach_(closest_approach) {}
  double closest_approach() const noexcept { return closest_approach_; }

 private:
  double closest_approach_;
};

/// A computed quantity disagrees with its expected value beyond tolerance.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace monodromy

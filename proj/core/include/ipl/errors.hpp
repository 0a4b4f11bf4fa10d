#pragma once

#include <stdexcept>
#include <string>

namespace ipl {

// Structural violation of a model ingredient (generator, rates, measure).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-step integration produced a non-finite or sign-violating state.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericalError(what + " (t = " + std::to_string(time) + ")"),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace ipl

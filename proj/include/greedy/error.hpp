#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace greedy {

// Bad input: dimensions, ranges, malformed configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite evaluations and search failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a search result does not meet the slack it was asked to honor.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The free-relaxation box kept growing and the minimizer stayed on its edge.
class UnboundedDirection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Wraps a search-layer failure with the iteration it happened in.
class IterationError : public NumericalError {
 public:
  IterationError(std::size_t iteration, const std::string& what)
      : NumericalError("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace greedy

#pragma once

#include <stdexcept>
#include <string>

namespace coloc {

// Malformed or infeasible input. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-formed request that could not be computed. The CLI maps this to exit code 3.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coloc

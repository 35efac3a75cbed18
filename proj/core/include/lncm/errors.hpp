#pragma once

#include <stdexcept>
#include <string>

namespace lncm {

/// Input violates a documented precondition (bad sizes, degenerate variance, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Method cannot be applied to this dataset or model (e.g. Gupta-Li with k != 2).
class UnsupportedMethod : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lncm

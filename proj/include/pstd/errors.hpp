#pragma once

#include <stdexcept>
#include <string>

namespace pstd {

/// Argument outside the mathematical domain of a function or model.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent user input (grids, files, configs).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested mode exists conceptually but has no implementation (e.g. an
/// analytic threshold for Fisher's test).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative numerics that failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pstd

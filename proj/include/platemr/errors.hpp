#pragma once

#include <stdexcept>
#include <string>

namespace platemr {

// Parameter outside the admissible range of an operation (rho <= 0, gamma
// at an exceptional value, sigma below the damping angle, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input that is not a parameter-range issue (size mismatch,
// too few nodes, empty probe sets).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A linear system or symbol that has no inverse at the requested point.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative numerics failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An object (pullback map, partition of unity) could not be built.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace platemr

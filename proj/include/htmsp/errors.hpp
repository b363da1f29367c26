#pragma once

#include <stdexcept>
#include <string>

namespace htmsp {

/// Invalid configuration: a parameter violates one of its invariants.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data does not match what an operation expects (sizes, ranges, files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derived quantity cannot be computed from the data provided.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace htmsp

#pragma once

#include <stdexcept>
#include <string>

namespace fdsense {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// The detector parameters admit no solution (e.g. no SIC factor reaches a
// requested false-alarm rate at the given threshold).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solution exists but falls outside the admissible parameter range.
struct RangeError : std::range_error {
  using std::range_error::range_error;
};

// Malformed or incomplete user configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fdsense

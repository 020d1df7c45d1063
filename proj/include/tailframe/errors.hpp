#pragma once

#include <stdexcept>

namespace tailframe {

// Input could not be parsed, or a structural constraint on it is violated.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The input family does not span the ambient space.
struct TotalityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operator that must be a strict contraction reached norm >= 1.
struct ContractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two independent computation routes disagreed beyond tolerance.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tailframe

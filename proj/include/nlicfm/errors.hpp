#pragma once

#include <stdexcept>
#include <string>

namespace nlicfm {

// Invariant violation in a link description; blocks computation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver divergence, degenerate fit, dispersion singularity, quadrature
// non-convergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable file or malformed document.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlicfm

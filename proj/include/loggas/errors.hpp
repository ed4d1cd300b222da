#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace loggas {

using cplx = std::complex<double>;

// Bad user input: scenario fields, parameter ranges.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver could not deliver a value (collisions, edge hits, fan too coarse...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loggas

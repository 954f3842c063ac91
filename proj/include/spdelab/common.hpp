#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>

namespace spdelab {

using Cplx = std::complex<double>;

/// Frequency or spatial point in R^d, d in {1,2,3}.
using Point = std::span<const double>;

/// Raised on violated preconditions and invalid configurations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double norm2(Point v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

}  // namespace spdelab

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

// Independent reference computations used only by the tests.
namespace oracle {

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

inline std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                                              double b) {
  return {integrate([&](double x) { return f(x).real(); }, a, b),
          integrate([&](double x) { return f(x).imag(); }, a, b)};
}

// Periodized heat kernel on [-L, L): sum over images of the N(0, 2 tau) density.
inline double periodic_gaussian(double x, double tau, double L, int images = 8) {
  double s = 0.0;
  for (int k = -images; k <= images; ++k) {
    const double y = x + 2.0 * L * k;
    s += std::exp(-y * y / (4.0 * tau)) / std::sqrt(4.0 * std::numbers::pi * tau);
  }
  return s;
}

// Periodized Cauchy density tau / (pi (tau^2 + x^2)) summed in closed form:
// sum_k tau/(pi(tau^2+(x+2Lk)^2)) = sinh(a) / (2L (cosh(a) - cos(b))), a = pi tau / L, b = pi x / L.
inline double periodic_cauchy(double x, double tau, double L) {
  const double a = std::numbers::pi * tau / L;
  const double b = std::numbers::pi * x / L;
  return std::sinh(a) / (2.0 * L * (std::cosh(a) - std::cos(b)));
}

}  // namespace oracle

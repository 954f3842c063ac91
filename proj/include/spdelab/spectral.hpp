#pragma once

#include <vector>

#include "spdelab/common.hpp"
#include "spdelab/grid.hpp"

namespace spdelab {

/// Fourier-series synthesis on the periodic box:
///   f(x_j) = (2L)^{-d} sum_k F(xi_k) exp(i xi_k . x_j).
/// `coeffs` are in FFT order. Backed by FFTW.
std::vector<Cplx> synthesize(const SpaceTimeGrid& grid, std::vector<Cplx> coeffs);

/// Discrete Fourier analysis, the exact inverse of `synthesize`:
///   F(xi_k) = dx^d sum_j f(x_j) exp(-i xi_k . x_j).
std::vector<Cplx> analyze(const SpaceTimeGrid& grid, std::vector<Cplx> values);
std::vector<Cplx> analyze(const SpaceTimeGrid& grid, std::span<const double> values);

/// Direct evaluation of the synthesized trigonometric polynomial at an
/// arbitrary point (no FFT). O(n^d) per point.
Cplx evaluate_series(const SpaceTimeGrid& grid, std::span<const Cplx> coeffs, Point x);

}  // namespace spdelab

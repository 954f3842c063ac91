#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "spdelab/common.hpp"

namespace spdelab {

/// Periodic spatial box [-L, L)^d sampled at n points per dimension, plus a
/// uniform partition of (0, T] into n_t steps.
///
/// Frequencies live on the dual lattice (pi/L) * {-n/2, ..., n/2-1}^d and are
/// stored in FFT order (index j corresponds to k = j for j < n/2 and k = j - n
/// otherwise).
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(double L, int n, int d, double T = 1.0, int n_t = 1);

  double half_width() const { return L_; }
  int n() const { return n_; }
  int dim() const { return d_; }
  double horizon() const { return T_; }
  int steps() const { return n_t_; }

  double dx() const { return 2.0 * L_ / n_; }
  double dt() const { return T_ / n_t_; }
  double cell_volume() const;
  double box_volume() const;
  std::size_t points() const { return points_; }

  double time(int i) const { return i * dt(); }

  /// Frequency of lattice index j along one axis.
  double frequency_1d(int j) const;
  /// Spatial coordinate of index j along one axis.
  double coordinate_1d(int j) const { return -L_ + j * dx(); }

  /// Frequency vector (length d) of flat index `flat`.
  Point frequency(std::size_t flat) const { return {&tables_->freqs[flat * d_], static_cast<std::size_t>(d_)}; }
  /// Spatial point (length d) of flat index `flat`.
  Point coordinate(std::size_t flat) const { return {&tables_->coords[flat * d_], static_cast<std::size_t>(d_)}; }

  /// True if any axis index sits on the unpaired Nyquist mode k = -n/2.
  bool is_nyquist(std::size_t flat) const;
  /// (-1)^{sum of axis indices}; the phase between FFT order and x_0 = -L.
  double alternating_sign(std::size_t flat) const { return tables_->signs[flat]; }

  /// Flat index of the point obtained by moving `steps` cells along every
  /// axis (periodic wrap).
  std::size_t shifted(std::size_t flat, std::span<const int> steps) const;

  SpaceTimeGrid refined() const { return {L_, 2 * n_, d_, T_, 2 * n_t_}; }

 private:
  double L_;
  int n_;
  int d_;
  double T_;
  int n_t_;
  std::size_t points_;
  struct Tables {
    std::vector<double> freqs;
    std::vector<double> coords;
    std::vector<double> signs;
  };
  // Shared so that copies of a grid are cheap.
  std::shared_ptr<const Tables> tables_;
};

}  // namespace spdelab

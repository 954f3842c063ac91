#include "spdelab/grid.hpp"

#include <cmath>
#include <numbers>

namespace spdelab {

SpaceTimeGrid::SpaceTimeGrid(double L, int n, int d, double T, int n_t)
    : L_(L), n_(n), d_(d), T_(T), n_t_(n_t) {
  if (!(L > 0.0)) throw Error("grid: half-width L must be positive");
  if (n < 2 || (n & (n - 1)) != 0) throw Error("grid: n must be a power of two >= 2");
  if (d < 1 || d > 3) throw Error("grid: dimension must be 1, 2 or 3");
  if (!(T > 0.0)) throw Error("grid: horizon T must be positive");
  if (n_t < 1) throw Error("grid: n_t must be >= 1");

  points_ = 1;
  for (int a = 0; a < d; ++a) points_ *= static_cast<std::size_t>(n);

  auto tables = std::make_shared<Tables>();
  tables->freqs.resize(points_ * d);
  tables->coords.resize(points_ * d);
  tables->signs.resize(points_);
  for (std::size_t flat = 0; flat < points_; ++flat) {
    std::size_t rem = flat;
    int parity = 0;
    // Row-major: the last axis varies fastest.
    for (int a = d - 1; a >= 0; --a) {
      const int j = static_cast<int>(rem % n);
      rem /= n;
      tables->freqs[flat * d + a] = frequency_1d(j);
      tables->coords[flat * d + a] = coordinate_1d(j);
      parity += j;
    }
    tables->signs[flat] = (parity % 2 == 0) ? 1.0 : -1.0;
  }
  tables_ = std::move(tables);
}

double SpaceTimeGrid::cell_volume() const { return std::pow(dx(), d_); }

double SpaceTimeGrid::box_volume() const { return std::pow(2.0 * L_, d_); }

double SpaceTimeGrid::frequency_1d(int j) const {
  const int k = (j < n_ / 2) ? j : j - n_;
  return std::numbers::pi / L_ * k;
}

bool SpaceTimeGrid::is_nyquist(std::size_t flat) const {
  std::size_t rem = flat;
  for (int a = 0; a < d_; ++a) {
    if (static_cast<int>(rem % n_) == n_ / 2) return true;
    rem /= n_;
  }
  return false;
}

std::size_t SpaceTimeGrid::shifted(std::size_t flat, std::span<const int> steps) const {
  std::size_t out = 0;
  std::size_t stride = 1;
  std::size_t rem = flat;
  for (int a = d_ - 1; a >= 0; --a) {
    const int j = static_cast<int>(rem % n_);
    rem /= n_;
    const int s = steps[a];
    const int moved = ((j + s) % n_ + n_) % n_;
    out += static_cast<std::size_t>(moved) * stride;
    stride *= n_;
  }
  return out;
}

}  // namespace spdelab

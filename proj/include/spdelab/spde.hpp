#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdelab/grid.hpp"
#include "spdelab/lpaley.hpp"
#include "spdelab/report.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab {

/// Independent Brownian increments dW^k on the uniform partition of (0, T].
/// Path i draws from its own stream seeded by derive_seed(seed, i), so any
/// path can be regenerated alone and enlarging the ensemble keeps the
/// existing paths.
class NoiseEnsemble {
 public:
  NoiseEnsemble(std::uint64_t seed, std::size_t paths, int modes, int steps, double T);

  std::uint64_t seed() const { return seed_; }
  std::size_t paths() const { return paths_; }
  int modes() const { return modes_; }
  int steps() const { return steps_; }
  double horizon() const { return T_; }
  double dt() const { return T_ / steps_; }

  /// Increments of one path, laid out as [step * modes + k], each N(0, dt).
  std::vector<double> increments(std::size_t path) const;

  NoiseEnsemble with_paths(std::size_t paths) const { return {seed_, paths, modes_, steps_, T_}; }

 private:
  std::uint64_t seed_;
  std::size_t paths_;
  int modes_;
  int steps_;
  double T_;
};

/// g^k(t, x) = sum_i 1_{(tau_{i-1}, tau_i]}(t) g^{ik}(x) with deterministic
/// times 0 = tau_0 < ... < tau_J.
struct AdaptedProcess {
  std::string id;
  std::vector<double> times;
  int modes = 1;
  std::function<double(int interval, int k, Point x)> profile;

  /// True if every profile vanishes on the grid.
  bool is_zero(const SpaceTimeGrid& grid) const;
};

/// u^hat(t_m) = sum_k sum_{j<m} exp(int_{t_j}^{t_m} psi) g^hat^k(t_j) dW^k_j per
/// lattice point, before any post multiplier; entry m-1 is t_m.
std::vector<std::vector<Cplx>> convolution_spectrum(const Symbol& sym, const AdaptedProcess& g,
                                                    const NoiseEnsemble& noise, const SpaceTimeGrid& grid,
                                                    std::size_t path);

/// |xi|^{gamma/2} (or phi(|xi|^2)^{1/2}) on the lattice, Nyquist modes zeroed.
std::vector<Cplx> half_power_multiplier(const Symbol& sym, const SpaceTimeGrid& grid);

/// One path of the stochastic convolution, multiplied on the frequency side
/// by `post_multiplier` (empty means 1) and synthesised at every grid time.
/// Slice m-1 holds u(t_m). Throws if the imaginary residue exceeds 1e-8 of
/// the field's scale.
ScalarField stochastic_convolution(const Symbol& sym, const AdaptedProcess& g, const NoiseEnsemble& noise,
                                   const SpaceTimeGrid& grid, const std::vector<Cplx>& post_multiplier,
                                   std::size_t path);

/// Monte Carlo E||u(t_eval)||^2 against the exact discrete sum, plus the
/// energy inequality E||u(t)||^2 + 2 nu E int ||(-Delta)^{gamma/4} u||^2 <=
/// int ||g||^2.
CheckReport ito_isometry_check(const Symbol& sym, const AdaptedProcess& g, const NoiseEnsemble& noise,
                               const SpaceTimeGrid& grid, double t_eval);

/// Seeded processes on 1, 2, 4 or 8 equal time intervals. Profiles are
/// smooth bumps of radius L/4 to L/2 centred within L/4 of the origin,
/// modulated by cos(w x_1 + phase) with w below 3 pi / L.
std::vector<AdaptedProcess> spde_battery(const SpaceTimeGrid& grid, int modes, std::uint64_t seed, int count = 10);

struct RatioOptions {
  bool allow_any_p = false;  ///< otherwise p must be 2, 4 or 6
  bool refine = true;        ///< also run on grid.refined()
};

/// (E int ||(-Delta)^{gamma/4} u||_p^p dt / int ||g||_{p,l2}^p dt)^{1/p} per
/// battery member with jackknife errors, on `noise` and on twice as many
/// paths. Passes iff every ratio is finite, path doubling moves it by less
/// than 2 SE, the SE is below 10% of the estimate and refinement moves the
/// max by less than 10%. At p = 2 the squared ratio is also compared with
/// the exact value.
CheckReport lp_ratio_estimate(const Symbol& sym, const std::vector<AdaptedProcess>& battery,
                              const NoiseEnsemble& noise, const SpaceTimeGrid& grid, double p,
                              const RatioOptions& options = {});

/// Binary path dump: four little-endian uint64 (paths, slices, points, d)
/// followed by the values as little-endian float64.
void write_path_dump(const std::string& file, const std::vector<ScalarField>& paths);

}  // namespace spdelab

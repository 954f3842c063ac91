#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdelab/bernstein.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/report.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab {

/// A point X = (t, x) of the space-time domain.
struct SpaceTimePoint {
  double t = 0.0;
  std::vector<double> x;
};

/// Quasi-metric rho(X, Y) = f(|t - s|) + |x - y| with either the parabolic
/// time part |t - s|^{1/gamma} or the subordinate one
/// phi^{-1}(|t - s|^{-1})^{-1/2}.
class QuasiMetric {
 public:
  enum class Kind { parabolic, subordinate };

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double gamma() const { return gamma_; }

  double operator()(const SpaceTimePoint& X, const SpaceTimePoint& Y) const;

  /// f(gap), with f(0) = 0.
  double time_part(double gap) const;
  /// The gap g >= 0 with f(g) = value.
  double gap_for(double value) const;

  /// Relaxed triangle constant N_rho.
  double triangle_constant() const { return n_rho_; }
  /// Hormander constant C0 (overridable).
  double hormander_constant() const { return c0_; }
  /// gamma_0 = (2 C0 N_rho + 1) N_rho.
  double gamma0() const { return (2.0 * c0_ * n_rho_ + 1.0) * n_rho_; }
  /// phi^{-1}(a) <= N_phi phi^{-1}(a / 2); only for subordinate metrics.
  std::optional<double> inverse_doubling() const { return n_phi_; }

  void override_hormander_constant(double c0);

  friend QuasiMetric parabolic_metric(double gamma);
  friend QuasiMetric subordinate_metric(const BernsteinFunction& phi);

 private:
  QuasiMetric() = default;
  double inverse_phi(double a) const;

  Kind kind_ = Kind::parabolic;
  std::string label_;
  double gamma_ = 2.0;
  double n_rho_ = 1.0;
  double c0_ = 1.0;
  std::optional<double> n_phi_;
  std::optional<BernsteinFunction> phi_;
};

/// N_rho = max(1, 2^{1/gamma - 1}), C0 = 4 2^{1/gamma}.
QuasiMetric parabolic_metric(double gamma);

/// C0 = 4 N_phi, N_rho = max(1, N_phi^{1/2}). Throws if phi is not
/// increasing. Beyond the evaluable range phi^{-1} is extended by the
/// claimed power laws.
QuasiMetric subordinate_metric(const BernsteinFunction& phi);

/// Space-time box (0, T) x [-L, L)^d in which balls are measured.
struct SpaceTimeBox {
  double T = 1.0;
  double L = 1.0;
  int d = 1;
};

/// Monte Carlo ball volume |B_c(X) n box| from `samples` uniform draws in the
/// bounding box of the ball.
double ball_volume(const QuasiMetric& rho, const SpaceTimePoint& center, double c, const SpaceTimeBox& box,
                   std::size_t samples, std::uint64_t seed);

/// max over centers and radii of |B_{gamma c}(X)| / |B_c(X)|, repeated with
/// twice the samples; passes iff the two maxima differ by less than 5%.
/// Centers whose larger ball leaves the box are discarded and flagged.
CheckReport doubling_check(const QuasiMetric& rho, double gamma_factor, const std::vector<SpaceTimePoint>& centers,
                           const std::vector<double>& c_list, const SpaceTimeBox& box,
                           std::size_t samples = 100000, std::uint64_t seed = 1);

/// Time quadrature of the Hormander integral: nodes clustered toward both
/// time arguments.
struct HormanderOptions {
  ClusterSpec cluster{14, 6, 1};
};

/// int_0^T [ int_{rho(X,Z) >= C0 rho(X,Y)} |K(r,t,z,x) - K(r,s,z,y)| dz ]^2 dr
/// for K(r,t,z,x) = 1_{r<t} k(r,t)(x - z), k the half-power kernel of `sym`
/// (|xi|^{gamma/2} or phi(|xi|^2)^{1/2} times exp(int_r^t psi)). Kernels
/// with a time gap too short to be resolved by the lattice are replaced by
/// the last resolved one.
double hormander_integral(const Symbol& sym, const QuasiMetric& rho, const SpaceTimePoint& X,
                          const SpaceTimePoint& Y, double T, const SpaceTimeGrid& grid,
                          const HormanderOptions& options = {});

/// Stratified pair sampler: `scales` dyadic levels rho(X,Y) in [r_k, 2 r_k),
/// r_k = rho_min 2^k, `pairs_per_scale` pairs each. The later time of each
/// pair is `t_late`; spatial offsets are snapped to the grid lattice.
/// rho_min = 0 places the top of the last level at L / C0; t_late = 0 means
/// half the horizon.
struct PairSampler {
  int scales = 8;
  int pairs_per_scale = 32;
  double rho_min = 0.0;
  double t_late = 0.0;
  std::uint64_t seed = 1;
};

struct SampledPair {
  int scale = 0;
  SpaceTimePoint X;
  SpaceTimePoint Y;
  double rho = 0.0;
};

/// `sampler` with rho_min and t_late resolved for `grid`.
PairSampler resolve_sampler(const QuasiMetric& rho, PairSampler sampler, const SpaceTimeGrid& grid);

std::vector<SampledPair> sample_pairs(const QuasiMetric& rho, const PairSampler& sampler, const SpaceTimeGrid& grid);

/// Max of hormander_integral over the stratified pairs on `grid` and on its
/// refinement. Passes iff the max is finite, drifts < 10% under refinement
/// and the log-log slope of the per-scale maxima against the scale is <= 0.1.
CheckReport hormander_sup_estimate(const Symbol& sym, const QuasiMetric& rho, const PairSampler& sampler, double T,
                                   const SpaceTimeGrid& grid, const HormanderOptions& options = {});

}  // namespace spdelab

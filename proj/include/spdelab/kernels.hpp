#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spdelab/bernstein.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/report.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab {

enum class KernelKind { p, frac_p, grad_frac_p, q1, q2 };

std::string to_string(KernelKind kind);

/// Fourier multiplier m(xi) applied on top of exp(int_s^t psi).
using Multiplier = std::function<Cplx(Point)>;

Multiplier unit_multiplier();
/// |xi|^power, with 0^power = 0 for power > 0.
Multiplier power_multiplier(double power);
/// The symbol's own half-power: |xi|^{gamma/2}, or phi(|xi|^2)^{1/2}.
Multiplier half_power_multiplier(const Symbol& sym);
/// i xi_axis times the half-power multiplier.
Multiplier gradient_multiplier(const Symbol& sym, int axis);

/// m(xi) exp(int_s^t psi(r, xi) dr) on the dual lattice, FFT order, with
/// the unpaired Nyquist modes set to zero.
std::vector<Cplx> kernel_spectrum(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid,
                                  const Multiplier& m);

/// m(xi) exp(int_r^t psi(u, xi) du) on the lattice with m the half-power
/// multiplier and the Nyquist modes zeroed. Time-homogeneous symbols with a
/// closed-form flow reuse one tabulated exponent.
class HalfPowerPropagator {
 public:
  HalfPowerPropagator(const Symbol& sym, const SpaceTimeGrid& grid);

  /// Zero when r >= t.
  std::vector<Cplx> operator()(double r, double t) const;
  const std::vector<Cplx>& multiplier() const { return multiplier_; }
  bool time_homogeneous() const { return homogeneous_; }
  /// int_0^1 psi per lattice point; empty unless time_homogeneous().
  const std::vector<Cplx>& unit_flow() const { return unit_flow_; }

 private:
  Symbol sym_;
  SpaceTimeGrid grid_;
  std::vector<Cplx> multiplier_;
  std::vector<Cplx> unit_flow_;
  bool homogeneous_ = false;
};

/// A kernel sampled on the spatial grid, with its Fourier coefficients.
struct KernelField {
  SpaceTimeGrid grid;
  std::vector<Cplx> spectrum;
  std::vector<Cplx> values;
  double s = 0.0;
  double t = 0.0;
  KernelKind kind = KernelKind::p;
  std::string symbol_id;

  /// Trapezoid (periodic) integral of the real part over the box.
  double mass() const;
  double l1_norm() const;
  double max_norm() const;
  double max_imag() const;
  /// ||values||^2_{L2(box)} computed on the physical side.
  double l2_norm_squared() const;
  /// (2L)^{-d} sum |spectrum|^2.
  double plancherel_l2_squared() const;
  Json metadata() const;
};

/// p(s,t,x) = F^{-1}[exp(int_s^t psi)](x). Throws unless s < t.
KernelField kernel_field(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid);

/// F^{-1}[|xi|^power exp(int_s^t psi)].
KernelField frac_power_kernel(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid, double power);

/// The symbol's half-power kernel, (-Delta)^{gamma/4} p or phi(Delta)^{1/2} p.
KernelField half_power_kernel(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid);

/// d/dx_axis of the half-power kernel.
KernelField gradient_kernel(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid, int axis);

/// q1(s,t,x) = F^{-1}[exp(int_s^t psi(r, tau^{-1/g} xi) dr)] and
/// q2(s,t,x) = tau F^{-1}[psi(t, tau^{-1/g} xi) |xi|^{g/2} exp(...)], tau = t - s.
std::pair<KernelField, KernelField> scaled_kernels_q(const Symbol& sym, double s, double t,
                                                     const SpaceTimeGrid& grid);

/// int_{|z| >= c} |kf(z)| dz over the box.
double l1_tail(const KernelField& kf, double c);
/// True when the region |z| >= c is cut by the box boundary (c > L).
bool tail_truncated(const KernelField& kf, double c);

/// int |kf(z + h) - kf(z)| dz. Components of h must be multiples of dx.
double translation_difference_l1(const KernelField& kf, std::span<const double> h);

/// int |K(r,t,z) - K(r,s,z)| dz for kind p or frac_p (the half-power
/// kernel). Requires r < s <= t.
double time_difference_l1(const Symbol& sym, double r, double s, double t, const SpaceTimeGrid& grid,
                          KernelKind kind);

/// Residuals of the change-of-variables identities
///   tau^{d/g} tau^{1/2} (-Delta)^{g/4} p(s,t,tau^{1/g} x) = (-Delta)^{g/4} q1(s,t,x)
///   d/dt (-Delta)^{g/4} p(s,t,x) = tau^{-d/g} tau^{-3/2} q2(s,t,tau^{-1/g} x)
/// at `samples` random grid points. Each residual is max |lhs - rhs| / max |rhs|.
CheckReport check_scaling_relations(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid,
                                    int samples = 50, std::uint64_t seed = 7, double tol = 1e-7);

// ---------------------------------------------------------------------------
// Kernel lemmas

/// Sweep of the controlling variable for the lemma checks: the radius c
/// (tail), the shift length |h| along the first axis (translation), or the
/// gap t - s (time). Time arguments default to s = 0, t = 1, a = 0.5.
struct LemmaSweep {
  std::vector<double> points;
  double s = 0.0;
  double t = 1.0;
  double a = 0.5;
  ClusterSpec cluster{};
  int smooth_panels = 8;  ///< Gauss-Legendre-8 panels on (0, a)
};

enum class LemmaKind { tail, translation, time };

/// Left sides, one per sweep point:
///   tail:        int_s^t [int_{|z|>=c} |K(r,t,z)| dz]^2 dr
///   translation: int_0^a [int |K(r,t,z+h) - K(r,t,z)| dz]^2 dr
///   time:        int_0^a [int |K(r,s+g,z) - K(r,s,z)| dz]^2 dr,  g = sweep point
/// with K the half-power kernel of `sym`.
std::vector<double> lemma_left_sides(const Symbol& sym, const SpaceTimeGrid& grid, LemmaKind kind,
                                     const LemmaSweep& sweep);

/// delta = 0.25 min(1, gamma).
double lemma_delta(double gamma);

/// Lemma checks mc1 (tail), mc2 (translation), mc3 (time) and freq
/// (frequency-side bound on |xi|^{g/2} F q1, sweep = gaps t - s). Fits the
/// log-log slope and the envelope LHS/RHS; passes iff the slope is at most
/// the exponent + 0.1 and max/min of the envelope is at most 10.
CheckReport verify_kernel_lemma(const Symbol& sym, const SpaceTimeGrid& grid, const std::string& lemma_id,
                                const LemmaSweep& sweep);

/// Default sweep for a lemma id on a grid.
LemmaSweep default_lemma_sweep(const std::string& lemma_id, const SpaceTimeGrid& grid);

/// Subordinate analogues 615_1 (tail, RHS (t-s) phi(c^{-2})), 615_2
/// (translation, RHS |h|^2 phi^{-1}((t-a)^{-1})) and 615_3 (time, RHS
/// (t-s)^2 (s-a)^{-2}) with the kernel phi(Delta)^{1/2} p. Passes iff the
/// envelope is bounded (max/min <= 10) and stable under one refinement.
CheckReport verify_subordinate_lemma(const BernsteinFunction& phi, const SpaceTimeGrid& grid,
                                     const std::string& which, const LemmaSweep& sweep);

/// Pointwise kernel bounds as_ker (phi(Delta)^{1/2} p), as_ker2 (its
/// gradient) and as_ker3 (phi(Delta)^{3/2} p) on a log-spaced (t, |x|)
/// lattice; reports sup LHS/RHS and its growth under one refinement.
CheckReport verify_bernstein_kernel_bounds(const BernsteinFunction& phi, int d, const std::string& which,
                                           int n = 2048);

}  // namespace spdelab

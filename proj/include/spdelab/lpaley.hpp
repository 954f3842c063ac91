#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdelab/grid.hpp"
#include "spdelab/metric.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/report.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab {

/// Real scalar field on the space-time grid. Slice i holds the values on the
/// time cell (i dt, (i+1) dt] and is reported at time (i+1) dt; within a
/// slice the layout is the grid's flat order.
struct ScalarField {
  SpaceTimeGrid grid;
  std::vector<double> values;

  explicit ScalarField(const SpaceTimeGrid& g);
  double& at(int slice, std::size_t flat) { return values[slice * grid.points() + flat]; }
  double at(int slice, std::size_t flat) const { return values[slice * grid.points() + flat]; }
  std::span<const double> slice(int i) const { return {values.data() + i * grid.points(), grid.points()}; }
};

/// l2-valued field truncated to `modes` components.
struct VectorField {
  SpaceTimeGrid grid;
  std::vector<ScalarField> components;

  VectorField(const SpaceTimeGrid& g, int modes);
  int modes() const { return static_cast<int>(components.size()); }
  /// Pointwise l2 modulus.
  ScalarField modulus() const;
};

/// Samples f(k, t, x) at cell midpoints t = (i + 1/2) dt.
VectorField sample_field(const SpaceTimeGrid& grid, int modes,
                         const std::function<double(int k, double t, Point x)>& f);

/// Per-mode int K(r,t,z,x) f(r,z) dz for the half-power kernel family, by
/// frequency-side multiplication with the slice of f containing r. Zero when
/// r >= t.
std::vector<std::vector<Cplx>> kernel_convolve(const Symbol& sym, const VectorField& f, double r, double t);

struct GOptions {
  /// Rule on every time cell, clustered toward the evaluation time.
  ClusterSpec cluster{40, 4, 4};
  double eps_tol = 1e-6;
};

struct GResult {
  ScalarField field;
  bool converged = true;
  /// Largest share of int_0^t carried by the innermost clustered level.
  double worst_tail = 0.0;
};

/// Gf(t,x) = [int_0^t |int K(r,t,z,x) f(r,z) dz|_{l2}^2 dr]^{1/2} at every
/// grid time. `converged` is false when the innermost level carries more
/// than eps_tol of the integral somewhere.
GResult g_operator(const Symbol& sym, const VectorField& f, const GOptions& options = {});

/// Exact ||Gf||_{L2}^2 / ||f||_{L2}^2 from the diagonal frequency-side form.
/// Requires a time-independent symbol with closed-form flow.
double plancherel_ratio_squared(const Symbol& sym, const VectorField& f);

/// One step of the p = 2 power iteration: multiplies every Fourier
/// coefficient of slice i by the weight of the quadratic form, then rescales
/// to unit L2 norm.
VectorField power_step(const Symbol& sym, const VectorField& f);

/// Ball family: radii c = 2^k c_min for k = 0.. until c exceeds the space-time
/// diameter; centers on every min(stride, 2^k)-th grid point of each axis.
/// c_min defaults to the smaller of dx and the time part of dt, so the
/// smallest balls are single grid cells.
struct BallFamily {
  int stride = 4;
  double c_min = 0.0;
};

/// sup of ball averages of |f| over the family balls containing each point.
/// Space is periodic; balls are cut at the time boundaries.
ScalarField maximal_function(const ScalarField& f, const QuasiMetric& rho, const BallFamily& family = {});

/// sup of mean oscillations over the family balls containing each point.
ScalarField sharp_function(const ScalarField& f, const QuasiMetric& rho, const BallFamily& family = {});

/// (sum |f|^p dx^d dt)^{1/p}; the l2 modulus for vector fields.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& f, double p);

/// Battery member: a generator evaluated on any grid.
struct TestField {
  std::string id;
  std::function<VectorField(const SpaceTimeGrid&)> make;
};

/// The 20-field battery: single modes, seeded trigonometric polynomials,
/// time indicators times smooth bumps and power-iterated fields. Members are
/// interleaved by family.
std::vector<TestField> lpaley_battery(const Symbol& sym, int modes = 2, std::uint64_t seed = 1);

/// Max over the battery of ||Gf||_p / ||f||_p for each p, on the grid and
/// its refinement. Passes iff every max is finite, the refinement drift is
/// below 10%, the max over the first half of the battery is within 10% of
/// the full max, and G converged. At p = 2 the ratio is also compared with
/// the exact Plancherel form when that is available.
CheckReport verify_lpaley(const Symbol& sym, const std::vector<TestField>& battery, const std::vector<double>& p_list,
                          const SpaceTimeGrid& grid, const GOptions& options = {});

}  // namespace spdelab

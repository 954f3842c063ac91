#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spdelab/common.hpp"
#include "spdelab/report.hpp"

namespace spdelab {

/// exp-exponent of the symbol flow for a fixed time window: xi -> int_s^t psi(r, xi) dr.
using Flow = std::function<Cplx(Point)>;

/// Implementation side of a symbol. Immutable; all methods are pure.
class SymbolModel {
 public:
  virtual ~SymbolModel() = default;

  virtual Cplx evaluate(double t, Point xi) const = 0;

  /// int_s^t psi(r, xi) dr. The default is composite midpoint with doubling.
  virtual Cplx integral(double s, double t, Point xi) const;

  /// Time-window specialisation of `integral`; models may precompute here.
  virtual Flow flow(double s, double t) const;

  virtual bool closed_form_integral() const { return false; }

  /// Multiplier playing the role of |xi|^{order/2}; empty means "use the
  /// default power".
  virtual std::optional<double> half_power(Point) const { return std::nullopt; }
};

struct SymbolInfo {
  std::string id;
  std::string label;
  int dim = 1;
  double order = 2.0;       ///< homogeneity order gamma
  double ellipticity = 1.0; ///< claimed nu; 0 when no lower bound is claimed
  bool time_dependent = false;
  bool homogeneous = true;
};

/// Time-dependent complex Fourier multiplier psi(t, xi) of a
/// pseudo-differential operator. Cheap to copy; shares its model.
class Symbol {
 public:
  Symbol(SymbolInfo info, std::shared_ptr<const SymbolModel> model);

  const SymbolInfo& info() const { return info_; }
  const std::string& id() const { return info_.id; }
  int dim() const { return info_.dim; }
  double order() const { return info_.order; }
  double ellipticity() const { return info_.ellipticity; }
  int d0() const { return info_.dim / 2 + 1; }
  bool has_closed_form_integral() const { return model_->closed_form_integral(); }

  Cplx operator()(double t, Point xi) const { return model_->evaluate(t, xi); }
  Cplx time_integral(double s, double t, Point xi) const { return model_->integral(s, t, xi); }
  Flow flow(double s, double t) const { return model_->flow(s, t); }

  /// |xi|^{gamma/2} for homogeneous symbols; phi(|xi|^2)^{1/2} for
  /// subordinate ones. Zero at xi = 0.
  double half_power(Point xi) const;

 private:
  SymbolInfo info_;
  std::shared_ptr<const SymbolModel> model_;
};

/// psi = -|xi|^2.
Symbol make_heat_symbol(int d);

/// psi = -|xi|^gamma, 0 < gamma <= 2.
Symbol make_fractional_symbol(int d, double gamma);

/// Coefficient a^{alpha beta}(t) of a 2m-order operator; alpha, beta are
/// multi-indices with |alpha| = |beta| = m.
using HighOrderCoefficient = std::function<Cplx(double t, std::span<const int> alpha, std::span<const int> beta)>;

/// psi(t, xi) = -sum a^{alpha beta}(t) xi^alpha xi^beta, order 2m. `nu` is the
/// ellipticity claimed by the caller. Time integrals are numeric unless
/// `time_dependent` is false.
Symbol make_high_order_symbol(int d, int m, HighOrderCoefficient coeffs, double nu, bool time_dependent,
                              std::string id = "high-order");

/// Angular density m(t, w) on the unit sphere.
using SphericalDensity = std::function<double(double t, Point w)>;

/// Non-local stable-like symbol
///   psi(t,xi) = -c1 int_{S^{d-1}} |(w,xi)|^g [1 - i phi_g(w,xi)] m(t,w) dS(w),
/// with c1 calibrated so that m = 1 gives -|xi|^g and c2 = tan(pi g / 2).
/// At g = 1 the cancellation int m(t,w) w dS = 0 is verified on
/// `cancellation_times`, otherwise construction throws.
Symbol make_nonlocal_symbol(int d, double gamma, SphericalDensity density, double nu, bool time_dependent,
                            std::string id = "nonlocal",
                            std::vector<double> cancellation_times = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0});

/// int_{S^{d-1}} m(t, w) w dS(w) by a fixed smooth rule (length d).
std::vector<double> sphere_first_moment(int d, const SphericalDensity& density, double t);

/// Builds a catalog symbol from its string id: "heat", "frac:<g>",
/// "order<2m>", "order<2m>:sin", "nonlocal:<g>:<const|even|tilt|pulse>",
/// "subord:<family>:<params...>".
Symbol symbol_from_id(const std::string& id, int d);

// ---------------------------------------------------------------------------
// Certificates

/// Central finite-difference D^alpha_xi psi(t, xi), step 1e-4 max(|xi|, 1).
Cplx symbol_derivative(const Symbol& sym, double t, Point xi, std::span<const int> alpha);

/// All multi-indices in dimension d with total order in [lo, hi].
std::vector<std::vector<int>> multi_indices(int d, int lo, int hi);

/// inf over (t, xi) of Re[-psi] / |xi|^gamma; passes iff inf >= nu (1 - tol_rel).
CheckReport check_ellipticity(const Symbol& sym, const std::vector<double>& t_samples,
                              const std::vector<std::vector<double>>& xi_grid, double tol_rel = 1e-12);

/// sup over (t, xi, |alpha| <= max_order) of |D^alpha psi| |xi|^{|alpha| - gamma}.
CheckReport check_derivative_bounds(const Symbol& sym, const std::vector<double>& t_samples,
                                    const std::vector<std::vector<double>>& xi_grid, int max_order);

struct DyadicFactor {
  std::vector<int> alpha;
  int power = 1;
};
using DyadicCombo = std::vector<DyadicFactor>;

/// int_{R <= |xi| < 2R} prod |D^{alpha_i} psi(t, xi)|^{k_i} dxi, with no
/// admissibility check.
double dyadic_shell_integral(const Symbol& sym, double t, double R, const DyadicCombo& combo);

/// d + sum k_i (gamma - |alpha_i|).
double dyadic_exponent(const Symbol& sym, const DyadicCombo& combo);

/// Throws unless sum |alpha_i| + sum k_i <= d0 + #{k_i > 0} and the combo has
/// at most d0 factors.
void require_admissible(const Symbol& sym, const DyadicCombo& combo);

/// Ratios shell_integral / R^exponent over R_list x combos x t_samples. Passes
/// iff every ratio is finite and, when `nu_inverse` is given, at most
/// nu_inverse (1 + tol_rel).
CheckReport check_dyadic_condition(const Symbol& sym, const std::vector<double>& R_list,
                                   const std::vector<DyadicCombo>& combos, const std::vector<double>& t_samples,
                                   std::optional<double> nu_inverse = std::nullopt, double tol_rel = 1e-6);

/// Origin-free sample grid: radii log-spaced in [r_min, r_max], directions
/// spread over the sphere.
std::vector<std::vector<double>> frequency_sample_grid(int d, double r_min, double r_max, int radii, int directions);

}  // namespace spdelab

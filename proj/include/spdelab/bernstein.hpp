#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spdelab/report.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab {

/// Lower and upper scaling exponents of a Bernstein function, as claimed by
/// its catalog entry.
struct ScalingExponents {
  double lower;
  double upper;
};

/// Evaluable range of every Bernstein function; evaluation outside is refused.
inline constexpr double kLambdaMin = 1e-12;
inline constexpr double kLambdaMax = 1e12;

/// Bernstein function phi: (0, inf) -> (0, inf), phi(0) = 0. Cheap to copy.
class BernsteinFunction {
 public:
  BernsteinFunction(std::string label, std::function<double(double)> f, std::optional<ScalingExponents> claim,
                    bool identity = false);

  /// phi(lambda) for lambda in {0} u [kLambdaMin, kLambdaMax].
  double operator()(double lambda) const;

  const std::string& label() const { return label_; }
  const std::optional<ScalingExponents>& claim() const { return claim_; }
  bool is_identity() const { return identity_; }

 private:
  std::string label_;
  std::function<double(double)> f_;
  std::optional<ScalingExponents> claim_;
  bool identity_;
};

/// lambda^alpha, 0 < alpha <= 1. alpha = 1 is the exact identity.
BernsteinFunction bernstein_power(double alpha);

/// Catalog members 1..6:
///   1: l^a + l^b (0 < a < b < 1)       2: (l + l^a)^b (a, b in (0,1))
///   3: l^a log(1+l)^b (b < 1-a)        4: l^a log(1+l)^{-b} (b < a)
///   5: log(cosh sqrt l)^a              6: (log sinh sqrt l - log sqrt l)^a
/// Members 5 and 6 take one parameter.
BernsteinFunction bernstein_catalog(int id, const std::vector<double>& params);

/// Parses "power:<a>", "<id>:<params>" or a family name ("alpha-beta",
/// "nested", "log-up", "log-down", "log-cosh", "log-sinh") followed by its
/// parameters, colon separated.
BernsteinFunction bernstein_from_id(const std::string& spec);

/// inf{ s > 0 : phi(s) >= t } by bisection in log s to absolute tolerance
/// 1e-12. Throws when t lies outside (phi(kLambdaMin), phi(kLambdaMax)].
double generalized_inverse(const BernsteinFunction& phi, double t);

/// Log-spaced grid of `points` values on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);

/// Envelope exponents inf / sup of log(phi(b)/phi(a)) / log(b/a) over all grid
/// pairs a < b, for phi and for its generalized inverse (over the image
/// grid). Passes iff both pairs lie within `tol` of the claimed exponents
/// (inverse claims are the reciprocals) when a claim exists.
CheckReport scaling_check(const BernsteinFunction& phi, const std::vector<double>& grid, double tol = 0.02);

/// Sufficient conditions (H1) on lambda, t >= 1 and (H2) on lambda, t <= 1
/// with the claimed exponents; reports c1, c2, c3.
CheckReport h_conditions_check(const BernsteinFunction& phi, const std::vector<double>& lambdas,
                               const std::vector<double>& ts);

/// Monotonicity, phi(0+) = 0 and concavity on a 10^4-point log grid over
/// [1e-8, 1e8], plus the limits at the ends of the evaluable range.
CheckReport bernstein_invariants(const BernsteinFunction& phi);

/// max over a log grid of phi^{-1}(a) / phi^{-1}(a/2).
double inverse_doubling_constant(const BernsteinFunction& phi);

/// Time-independent symbol -phi(|xi|^2) with closed-form flow and
/// half-power multiplier phi(|xi|^2)^{1/2}.
Symbol subordinate_symbol(const BernsteinFunction& phi, int d, std::string id = "");

}  // namespace spdelab

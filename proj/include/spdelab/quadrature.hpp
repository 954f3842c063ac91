#pragma once

#include <functional>
#include <vector>

namespace spdelab {

struct QuadNode {
  double x;
  double w;
};

using QuadRule = std::vector<QuadNode>;

/// Gauss-Legendre rule with `points` in {1, 2, 4, 8, 16, 32} mapped to [a, b].
/// One point is the midpoint rule.
QuadRule gauss_legendre(int points, double a, double b);

/// Fixed double-exponential (tanh-sinh) rule on [a, b]: the trapezoid rule in
/// the variable u with x = (a+b)/2 + (b-a)/2 tanh(pi/2 sinh u). Handles
/// integrable endpoint singularities with spectral accuracy.
QuadRule tanh_sinh(int half_points, double a, double b);

/// Panel layout for integrals whose integrand degenerates as r approaches
/// a singular point at or beyond the upper limit.
struct ClusterSpec {
  int levels = 20;           ///< dyadic levels of distance to the singular point
  int panels_per_level = 10;
  int points_per_panel = 1;  ///< 1 = composite midpoint
};

/// Nodes on [lo, hi] clustered geometrically toward `singular` >= hi.
/// Level l covers distances (D 2^{-l-1}, D 2^{-l}] with D = singular - lo;
/// the leftover piece next to `singular` gets one extra panel so the rule
/// integrates all of [lo, hi].
QuadRule clustered(double lo, double hi, double singular, const ClusterSpec& spec);

/// Composite midpoint rule with doubling: starts at `panels_per_unit` panels
/// per unit length and doubles until the relative change drops below `rel_tol`.
double midpoint_doubling(const std::function<double(double)>& f, double a, double b,
                         int panels_per_unit = 64, double rel_tol = 1e-9, int max_doublings = 14);

}  // namespace spdelab

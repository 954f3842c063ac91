#include "spdelab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spdelab/common.hpp"

namespace spdelab {
namespace {

template <unsigned N>
QuadRule gauss_impl(double a, double b) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  QuadRule rule;
  rule.reserve(N);
  // Boost stores the non-negative half of a symmetric rule; x = 0 comes first
  // when N is odd.
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      rule.push_back({mid, half * ws[i]});
    } else {
      rule.push_back({mid - half * xs[i], half * ws[i]});
      rule.push_back({mid + half * xs[i], half * ws[i]});
    }
  }
  std::sort(rule.begin(), rule.end(), [](const QuadNode& l, const QuadNode& r) { return l.x < r.x; });
  return rule;
}

}  // namespace

QuadRule gauss_legendre(int points, double a, double b) {
  switch (points) {
    case 1:
      return {{0.5 * (a + b), b - a}};
    case 2:
      return gauss_impl<2>(a, b);
    case 4:
      return gauss_impl<4>(a, b);
    case 8:
      return gauss_impl<8>(a, b);
    case 16:
      return gauss_impl<16>(a, b);
    case 32:
      return gauss_impl<32>(a, b);
    default:
      throw Error("gauss_legendre: unsupported point count");
  }
}

QuadRule tanh_sinh(int half_points, double a, double b) {
  // Step chosen so the outermost node sits where the weight has decayed to
  // double-precision noise (|u| ~ 3.2).
  const double u_max = 3.2;
  const double h = u_max / half_points;
  const double half = 0.5 * (b - a);
  QuadRule rule;
  rule.reserve(2 * half_points + 1);
  for (int k = -half_points; k <= half_points; ++k) {
    const double u = k * h;
    const double s = 0.5 * std::numbers::pi * std::sinh(u);
    const double c = std::cosh(s);
    const double w = 0.5 * std::numbers::pi * h * std::cosh(u) / (c * c);
    // 1 - tanh(s) written via exp to keep nodes off the endpoints.
    const double e = std::exp(-2.0 * std::abs(s));
    const double one_minus = 2.0 * e / (1.0 + e);
    const double x = (s >= 0.0) ? b - half * one_minus : a + half * one_minus;
    rule.push_back({x, half * w});
  }
  return rule;
}

QuadRule clustered(double lo, double hi, double singular, const ClusterSpec& spec) {
  if (!(hi > lo)) return {};
  if (singular < hi) throw Error("clustered: singular point must not lie inside the interval");
  const double d_far = singular - lo;
  const double d_near = singular - hi;
  QuadRule rule;
  double outer = d_far;
  for (int level = 0; level < spec.levels && outer > d_near; ++level) {
    const double inner = std::max(0.5 * outer, d_near);
    const double width = (outer - inner) / spec.panels_per_level;
    for (int p = 0; p < spec.panels_per_level; ++p) {
      const double a = singular - outer + p * width;
      auto panel = gauss_legendre(spec.points_per_panel, a, a + width);
      rule.insert(rule.end(), panel.begin(), panel.end());
    }
    outer = inner;
  }
  if (outer > d_near) {
    // Sliver next to the singular point left after the last level.
    auto panel = gauss_legendre(spec.points_per_panel, singular - outer, hi);
    rule.insert(rule.end(), panel.begin(), panel.end());
  }
  return rule;
}

double midpoint_doubling(const std::function<double(double)>& f, double a, double b,
                         int panels_per_unit, double rel_tol, int max_doublings) {
  if (a == b) return 0.0;
  const double len = std::abs(b - a);
  int panels = std::max(1, static_cast<int>(std::ceil(panels_per_unit * len)));
  auto midpoint = [&](int m) {
    const double h = (b - a) / m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += f(a + (i + 0.5) * h);
    return acc * h;
  };
  double prev = midpoint(panels);
  for (int it = 0; it < max_doublings; ++it) {
    panels *= 2;
    const double next = midpoint(panels);
    if (std::abs(next - prev) <= rel_tol * std::abs(next) || next == prev) return next;
    prev = next;
  }
  return prev;
}

}  // namespace spdelab

#include "spdelab/symbols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spdelab/quadrature.hpp"

namespace spdelab {

// ---------------------------------------------------------------------------
// SymbolModel defaults

namespace {

Cplx midpoint_doubling_complex(const std::function<Cplx(double)>& f, double a, double b) {
  if (a == b) return {0.0, 0.0};
  const int base = std::max(1, static_cast<int>(std::ceil(64.0 * std::abs(b - a))));
  auto midpoint = [&](int m) {
    const double h = (b - a) / m;
    Cplx acc{0.0, 0.0};
    for (int i = 0; i < m; ++i) acc += f(a + (i + 0.5) * h);
    return acc * h;
  };
  int panels = base;
  Cplx prev = midpoint(panels);
  for (int it = 0; it < 14; ++it) {
    panels *= 2;
    const Cplx next = midpoint(panels);
    if (std::abs(next - prev) <= 1e-9 * std::abs(next) || next == prev) return next;
    prev = next;
  }
  return prev;
}

}  // namespace

Cplx SymbolModel::integral(double s, double t, Point xi) const {
  return midpoint_doubling_complex([&](double r) { return evaluate(r, xi); }, s, t);
}

Flow SymbolModel::flow(double s, double t) const {
  return [this, s, t](Point xi) { return integral(s, t, xi); };
}

Symbol::Symbol(SymbolInfo info, std::shared_ptr<const SymbolModel> model)
    : info_(std::move(info)), model_(std::move(model)) {
  if (!model_) throw Error("symbol: null model");
  if (info_.dim < 1 || info_.dim > 3) throw Error("symbol: dimension must be 1, 2 or 3");
}

double Symbol::half_power(Point xi) const {
  if (auto custom = model_->half_power(xi)) return *custom;
  const double r2 = norm2(xi);
  if (r2 == 0.0) return 0.0;
  if (info_.order == 2.0) return std::sqrt(r2);
  return std::pow(r2, 0.25 * info_.order);
}

// ---------------------------------------------------------------------------
// Catalog models

namespace {

class HeatModel final : public SymbolModel {
 public:
  Cplx evaluate(double, Point xi) const override { return {-norm2(xi), 0.0}; }
  Cplx integral(double s, double t, Point xi) const override { return {-(t - s) * norm2(xi), 0.0}; }
  Flow flow(double s, double t) const override {
    return [s, t](Point xi) { return Cplx{-(t - s) * norm2(xi), 0.0}; };
  }
  bool closed_form_integral() const override { return true; }
};

class FractionalModel final : public SymbolModel {
 public:
  explicit FractionalModel(double gamma) : gamma_(gamma) {}
  Cplx evaluate(double, Point xi) const override { return {-magnitude(xi), 0.0}; }
  Cplx integral(double s, double t, Point xi) const override { return {-(t - s) * magnitude(xi), 0.0}; }
  Flow flow(double s, double t) const override {
    return [this, s, t](Point xi) { return Cplx{-(t - s) * magnitude(xi), 0.0}; };
  }
  bool closed_form_integral() const override { return true; }

 private:
  double magnitude(Point xi) const { return std::pow(norm2(xi), 0.5 * gamma_); }
  double gamma_;
};

class HighOrderModel final : public SymbolModel {
 public:
  HighOrderModel(int d, int m, HighOrderCoefficient coeffs, bool time_dependent)
      : d_(d), coeffs_(std::move(coeffs)), time_dependent_(time_dependent), indices_(multi_indices(d, m, m)) {}

  Cplx evaluate(double t, Point xi) const override {
    const auto mono = monomials(xi);
    Cplx acc{0.0, 0.0};
    for (std::size_t a = 0; a < indices_.size(); ++a)
      for (std::size_t b = 0; b < indices_.size(); ++b) {
        if (mono[a] == 0.0 || mono[b] == 0.0) continue;
        acc += coeffs_(t, indices_[a], indices_[b]) * (mono[a] * mono[b]);
      }
    return -acc;
  }

  Cplx integral(double s, double t, Point xi) const override { return flow(s, t)(xi); }

  Flow flow(double s, double t) const override {
    const std::size_t k = indices_.size();
    std::vector<Cplx> integrated(k * k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        if (time_dependent_) {
          integrated[a * k + b] = midpoint_doubling_complex(
              [&](double r) { return coeffs_(r, indices_[a], indices_[b]); }, s, t);
        } else {
          integrated[a * k + b] = (t - s) * coeffs_(s, indices_[a], indices_[b]);
        }
      }
    return [this, integrated = std::move(integrated)](Point xi) {
      const auto mono = monomials(xi);
      const std::size_t n = indices_.size();
      Cplx acc{0.0, 0.0};
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) acc += integrated[a * n + b] * (mono[a] * mono[b]);
      return -acc;
    };
  }

  bool closed_form_integral() const override { return !time_dependent_; }

 private:
  std::vector<double> monomials(Point xi) const {
    std::vector<double> out(indices_.size(), 1.0);
    for (std::size_t a = 0; a < indices_.size(); ++a)
      for (int axis = 0; axis < d_; ++axis)
        for (int p = 0; p < indices_[a][axis]; ++p) out[a] *= xi[axis];
    return out;
  }

  int d_;
  HighOrderCoefficient coeffs_;
  bool time_dependent_;
  std::vector<std::vector<int>> indices_;
};

// Quadrature node on the unit sphere in a frame whose first axis is
// e = xi/|xi|: direction = u e + a e1 + b e2.
struct SphereNode {
  double u;
  double a;
  double b;
  double weight;
};

std::vector<SphereNode> aligned_sphere_rule(int d) {
  std::vector<SphereNode> nodes;
  if (d == 1) {
    nodes.push_back({1.0, 0.0, 0.0, 1.0});
    nodes.push_back({-1.0, 0.0, 0.0, 1.0});
  } else if (d == 2) {
    // Two half circles split at the kinks of |cos(theta)|^g; the second is the
    // exact antipode of the first.
    const double half_pi = 0.5 * std::numbers::pi;
    for (const auto& q : tanh_sinh(127, -half_pi, half_pi)) {
      nodes.push_back({std::cos(q.x), std::sin(q.x), 0.0, q.w});
      nodes.push_back({-std::cos(q.x), -std::sin(q.x), 0.0, q.w});
    }
  } else {
    const int n_phi = 32;
    for (const auto& q : tanh_sinh(15, 0.0, 1.0)) {
      const double v = std::sqrt(std::max(0.0, 1.0 - q.x * q.x));
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / n_phi;
        const double w = q.w * 2.0 * std::numbers::pi / n_phi;
        const double a = v * std::cos(phi);
        const double b = v * std::sin(phi);
        nodes.push_back({q.x, a, b, w});
        nodes.push_back({-q.x, -a, -b, w});
      }
    }
  }
  return nodes;
}

}  // namespace
}  // namespace spdelab

namespace spdelab {
namespace {

// Orthonormal completion of the unit vector e (length d).
void complete_frame(Point e, std::array<double, 3>& e1, std::array<double, 3>& e2) {
  e1 = {0.0, 0.0, 0.0};
  e2 = {0.0, 0.0, 0.0};
  if (e.size() == 2) {
    e1 = {-e[1], e[0], 0.0};
  } else if (e.size() == 3) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < 3; ++i)
      if (std::abs(e[i]) < std::abs(e[pick])) pick = i;
    std::array<double, 3> h{0.0, 0.0, 0.0};
    h[pick] = 1.0;
    const double proj = h[0] * e[0] + h[1] * e[1] + h[2] * e[2];
    for (int i = 0; i < 3; ++i) e1[i] = h[i] - proj * e[i];
    const double len = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& c : e1) c /= len;
    e2 = {e[1] * e1[2] - e[2] * e1[1], e[2] * e1[0] - e[0] * e1[2], e[0] * e1[1] - e[1] * e1[0]};
  }
}

class NonlocalModel final : public SymbolModel {
 public:
  NonlocalModel(int d, double gamma, SphericalDensity density, bool time_dependent)
      : d_(d), gamma_(gamma), density_(std::move(density)), time_dependent_(time_dependent),
        nodes_(aligned_sphere_rule(d)) {
    double mass = 0.0;
    for (const auto& nd : nodes_) mass += nd.weight * std::pow(std::abs(nd.u), gamma_);
    c1_ = 1.0 / mass;
    c2_ = (gamma_ == 1.0) ? 0.0 : std::tan(0.5 * std::numbers::pi * gamma_);
  }

  Cplx evaluate(double t, Point xi) const override {
    const double r = std::sqrt(norm2(xi));
    if (r == 0.0) return {0.0, 0.0};
    std::array<double, 3> e{0.0, 0.0, 0.0};
    for (int i = 0; i < d_; ++i) e[i] = xi[i] / r;
    std::array<double, 3> e1, e2;
    complete_frame(Point(e.data(), d_), e1, e2);
    std::array<double, 3> w{0.0, 0.0, 0.0};
    Cplx acc{0.0, 0.0};
    for (const auto& nd : nodes_) {
      const double proj = r * nd.u;
      if (proj == 0.0) continue;
      for (int i = 0; i < d_; ++i) w[i] = nd.u * e[i] + nd.a * e1[i] + nd.b * e2[i];
      const double sign = proj > 0.0 ? 1.0 : -1.0;
      const double skew = (gamma_ == 1.0) ? -2.0 / std::numbers::pi * sign * std::log(std::abs(proj)) : c2_ * sign;
      const double mag = std::pow(std::abs(proj), gamma_);
      acc += nd.weight * mag * density_(t, Point(w.data(), d_)) * Cplx{1.0, -skew};
    }
    return -c1_ * acc;
  }

  Cplx integral(double s, double t, Point xi) const override {
    if (!time_dependent_) return (t - s) * evaluate(s, xi);
    return SymbolModel::integral(s, t, xi);
  }

  Flow flow(double s, double t) const override {
    return [this, s, t](Point xi) { return integral(s, t, xi); };
  }

  bool closed_form_integral() const override { return !time_dependent_; }

 private:
  int d_;
  double gamma_;
  SphericalDensity density_;
  bool time_dependent_;
  std::vector<SphereNode> nodes_;
  double c1_ = 1.0;
  double c2_ = 0.0;
};

}  // namespace

Symbol make_heat_symbol(int d) {
  SymbolInfo info{"heat", "heat: -|xi|^2", d, 2.0, 1.0, false, true};
  return Symbol(info, std::make_shared<HeatModel>());
}

Symbol make_fractional_symbol(int d, double gamma) {
  if (!(gamma > 0.0) || gamma > 2.0) throw Error("fractional symbol: order must lie in (0, 2]");
  std::ostringstream id;
  id << "frac:" << gamma;
  SymbolInfo info{id.str(), "fractional: -|xi|^" + id.str().substr(5), d, gamma, 1.0, false, true};
  return Symbol(info, std::make_shared<FractionalModel>(gamma));
}

Symbol make_high_order_symbol(int d, int m, HighOrderCoefficient coeffs, double nu, bool time_dependent,
                              std::string id) {
  if (m < 1) throw Error("high-order symbol: m must be >= 1");
  SymbolInfo info{std::move(id), "order-" + std::to_string(2 * m) + " differential operator", d, 2.0 * m, nu,
                  time_dependent, true};
  return Symbol(info, std::make_shared<HighOrderModel>(d, m, std::move(coeffs), time_dependent));
}

std::vector<double> sphere_first_moment(int d, const SphericalDensity& density, double t) {
  std::vector<double> moment(d, 0.0);
  if (d == 1) {
    const double plus = 1.0, minus = -1.0;
    moment[0] = density(t, Point(&plus, 1)) - density(t, Point(&minus, 1));
  } else if (d == 2) {
    const int n = 512;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n;
      const double w[2] = {std::cos(th), std::sin(th)};
      const double m = density(t, Point(w, 2)) * 2.0 * std::numbers::pi / n;
      moment[0] += m * w[0];
      moment[1] += m * w[1];
    }
  } else {
    const int n_phi = 32;
    for (const auto& q : gauss_legendre(16, -1.0, 1.0)) {
      const double v = std::sqrt(1.0 - q.x * q.x);
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / n_phi;
        const double w[3] = {v * std::cos(phi), v * std::sin(phi), q.x};
        const double m = density(t, Point(w, 3)) * q.w * 2.0 * std::numbers::pi / n_phi;
        for (int i = 0; i < 3; ++i) moment[i] += m * w[i];
      }
    }
  }
  return moment;
}

namespace {
double sphere_mass(int d, const SphericalDensity& density, double t) {
  double mass = 0.0;
  if (d == 1) {
    const double plus = 1.0, minus = -1.0;
    mass = density(t, Point(&plus, 1)) + density(t, Point(&minus, 1));
  } else if (d == 2) {
    const int n = 512;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n;
      const double w[2] = {std::cos(th), std::sin(th)};
      mass += density(t, Point(w, 2)) * 2.0 * std::numbers::pi / n;
    }
  } else {
    const int n_phi = 32;
    for (const auto& q : gauss_legendre(16, -1.0, 1.0)) {
      const double v = std::sqrt(1.0 - q.x * q.x);
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / n_phi;
        const double w[3] = {v * std::cos(phi), v * std::sin(phi), q.x};
        mass += density(t, Point(w, 3)) * q.w * 2.0 * std::numbers::pi / n_phi;
      }
    }
  }
  return mass;
}
}  // namespace

Symbol make_nonlocal_symbol(int d, double gamma, SphericalDensity density, double nu, bool time_dependent,
                            std::string id, std::vector<double> cancellation_times) {
  if (!(gamma > 0.0) || !(gamma < 2.0)) throw Error("nonlocal symbol: order must lie in (0, 2)");
  if (gamma == 1.0) {
    for (double t : cancellation_times) {
      const auto moment = sphere_first_moment(d, density, t);
      const double mass = sphere_mass(d, density, t);
      double len = 0.0;
      for (double c : moment) len += c * c;
      len = std::sqrt(len);
      if (len > 1e-8 * std::max(mass, 1e-300)) {
        std::ostringstream msg;
        msg << "nonlocal symbol: cancellation condition violated at gamma = 1 (|int m w dS| = " << len
            << " at t = " << t << ")";
        throw Error(msg.str());
      }
    }
  }
  SymbolInfo info{std::move(id), "nonlocal stable-like operator", d, gamma, nu, time_dependent, true};
  return Symbol(info, std::make_shared<NonlocalModel>(d, gamma, std::move(density), time_dependent));
}

// ---------------------------------------------------------------------------
// Finite differences and certificates

std::vector<std::vector<int>> multi_indices(int d, int lo, int hi) {
  std::vector<std::vector<int>> out;
  for (int total = lo; total <= hi; ++total) {
    std::vector<int> alpha(d, 0);
    // Enumerate compositions of `total` into d parts, first axis descending.
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == d - 1) {
        alpha[axis] = left;
        out.push_back(alpha);
        return;
      }
      for (int v = left; v >= 0; --v) {
        alpha[axis] = v;
        rec(axis + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

namespace {

struct StencilTap {
  int offset;
  double coeff;
};

std::vector<StencilTap> central_stencil(int order) {
  switch (order) {
    case 0:
      return {{0, 1.0}};
    case 1:
      return {{-1, -0.5}, {1, 0.5}};
    case 2:
      return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3:
      return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    case 4:
      return {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}};
    default:
      throw Error("symbol_derivative: derivative order per axis must be <= 4");
  }
}

std::string alpha_key(std::span<const int> alpha) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << alpha[i];
  os << ")";
  return os.str();
}

}  // namespace

Cplx symbol_derivative(const Symbol& sym, double t, Point xi, std::span<const int> alpha) {
  const int d = sym.dim();
  if (static_cast<int>(alpha.size()) != d || static_cast<int>(xi.size()) != d)
    throw Error("symbol_derivative: dimension mismatch");
  const double h = 1e-4 * std::max(std::sqrt(norm2(xi)), 1.0);
  int total = 0;
  for (int a : alpha) total += a;
  if (total == 0) return sym(t, xi);

  std::vector<std::vector<StencilTap>> stencils;
  for (int axis = 0; axis < d; ++axis) stencils.push_back(central_stencil(alpha[axis]));

  std::array<double, 3> point{0.0, 0.0, 0.0};
  Cplx acc{0.0, 0.0};
  std::function<void(int, double)> rec = [&](int axis, double weight) {
    if (axis == d) {
      acc += weight * sym(t, Point(point.data(), d));
      return;
    }
    for (const auto& tap : stencils[axis]) {
      point[axis] = xi[axis] + tap.offset * h;
      rec(axis + 1, weight * tap.coeff);
    }
  };
  rec(0, 1.0);
  return acc / std::pow(h, total);
}

CheckReport check_ellipticity(const Symbol& sym, const std::vector<double>& t_samples,
                              const std::vector<std::vector<double>>& xi_grid, double tol_rel) {
  if (t_samples.empty() || xi_grid.empty()) throw Error("check_ellipticity: empty sample grid");
  CheckReport rep;
  rep.name = "ellipticity:" + sym.id();
  double inf = std::numeric_limits<double>::infinity();
  double arg_t = 0.0, arg_r = 0.0;
  for (double t : t_samples)
    for (const auto& xi : xi_grid) {
      const double r2 = norm2(xi);
      if (r2 == 0.0) throw Error("check_ellipticity: frequency grid must exclude the origin");
      const double ratio = (-sym(t, xi)).real() / std::pow(r2, 0.5 * sym.order());
      if (ratio < inf) {
        inf = ratio;
        arg_t = t;
        arg_r = std::sqrt(r2);
      }
    }
  rep.set("inf_ratio", inf);
  rep.set("nu", sym.ellipticity());
  rep.set("argmin_t", arg_t);
  rep.set("argmin_abs_xi", arg_r);
  rep.set("tol_rel", tol_rel);
  rep.passed = std::isfinite(inf) && inf >= sym.ellipticity() * (1.0 - tol_rel);
  return rep;
}

CheckReport check_derivative_bounds(const Symbol& sym, const std::vector<double>& t_samples,
                                    const std::vector<std::vector<double>>& xi_grid, int max_order) {
  if (max_order > sym.d0()) throw Error("check_derivative_bounds: max_order must not exceed d0");
  if (t_samples.empty() || xi_grid.empty()) throw Error("check_derivative_bounds: empty sample grid");
  CheckReport rep;
  rep.name = "derivative-bounds:" + sym.id();
  double overall = 0.0;
  for (const auto& alpha : multi_indices(sym.dim(), 0, max_order)) {
    int total = 0;
    for (int a : alpha) total += a;
    double sup = 0.0;
    for (double t : t_samples)
      for (const auto& xi : xi_grid) {
        const double r = std::sqrt(norm2(xi));
        if (r == 0.0) throw Error("check_derivative_bounds: frequency grid must exclude the origin");
        const double v = std::abs(symbol_derivative(sym, t, xi, alpha)) * std::pow(r, total - sym.order());
        sup = std::max(sup, v);
      }
    rep.set("sup_alpha" + alpha_key(alpha), sup);
    overall = std::max(overall, sup);
  }
  rep.set("sup", overall);
  rep.set("max_order", max_order);
  rep.passed = std::isfinite(overall);
  return rep;
}

double dyadic_exponent(const Symbol& sym, const DyadicCombo& combo) {
  double e = sym.dim();
  for (const auto& f : combo) {
    int total = 0;
    for (int a : f.alpha) total += a;
    e += f.power * (sym.order() - total);
  }
  return e;
}

void require_admissible(const Symbol& sym, const DyadicCombo& combo) {
  if (static_cast<int>(combo.size()) > sym.d0()) throw Error("dyadic condition: more factors than d0");
  int budget = sym.d0();
  int used = 0;
  for (const auto& f : combo) {
    if (static_cast<int>(f.alpha.size()) != sym.dim()) throw Error("dyadic condition: multi-index has wrong length");
    if (f.power < 0) throw Error("dyadic condition: negative power");
    for (int a : f.alpha) {
      if (a < 0) throw Error("dyadic condition: negative multi-index entry");
      used += a;
    }
    used += f.power;
    if (f.power > 0) ++budget;
  }
  if (used > budget) {
    std::ostringstream msg;
    msg << "dyadic condition: index combo violates sum|alpha_i| + sum k_i <= d0 + #{k_i > 0} (" << used << " > "
        << budget << ")";
    throw Error(msg.str());
  }
}

double dyadic_shell_integral(const Symbol& sym, double t, double R, const DyadicCombo& combo) {
  const int d = sym.dim();
  auto integrand = [&](Point xi) {
    double v = 1.0;
    for (const auto& f : combo) {
      if (f.power == 0) continue;
      v *= std::pow(std::abs(symbol_derivative(sym, t, xi, f.alpha)), f.power);
    }
    return v;
  };
  const auto radial = gauss_legendre(32, R, 2.0 * R);
  double acc = 0.0;
  if (d == 1) {
    for (const auto& q : radial) {
      const double plus = q.x, minus = -q.x;
      acc += q.w * (integrand(Point(&plus, 1)) + integrand(Point(&minus, 1)));
    }
  } else if (d == 2) {
    const int n_theta = 64;
    for (const auto& q : radial)
      for (int k = 0; k < n_theta; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / n_theta;
        const double xi[2] = {q.x * std::cos(th), q.x * std::sin(th)};
        acc += q.w * q.x * (2.0 * std::numbers::pi / n_theta) * integrand(Point(xi, 2));
      }
  } else {
    const int n_phi = 32;
    const auto polar = gauss_legendre(16, -1.0, 1.0);
    for (const auto& q : radial)
      for (const auto& c : polar) {
        const double v = std::sqrt(1.0 - c.x * c.x);
        for (int k = 0; k < n_phi; ++k) {
          const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_phi;
          const double xi[3] = {q.x * v * std::cos(phi), q.x * v * std::sin(phi), q.x * c.x};
          acc += q.w * q.x * q.x * c.w * (2.0 * std::numbers::pi / n_phi) * integrand(Point(xi, 3));
        }
      }
  }
  return acc;
}

CheckReport check_dyadic_condition(const Symbol& sym, const std::vector<double>& R_list,
                                   const std::vector<DyadicCombo>& combos, const std::vector<double>& t_samples,
                                   std::optional<double> nu_inverse, double tol_rel) {
  if (R_list.size() < 2 || combos.empty() || t_samples.empty()) throw Error("check_dyadic_condition: empty sweep");
  const auto [rmin, rmax] = std::minmax_element(R_list.begin(), R_list.end());
  if (!(*rmin > 0.0) || *rmax / *rmin < 16.0)
    throw Error("check_dyadic_condition: R sweep must be positive and span at least four dyadic levels");
  for (const auto& combo : combos) require_admissible(sym, combo);

  CheckReport rep;
  rep.name = "dyadic-condition:" + sym.id();
  double sup = 0.0;
  bool finite = true;
  Json table = Json::array();
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const double expo = dyadic_exponent(sym, combos[c]);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double t : t_samples)
      for (double R : R_list) {
        const double ratio = dyadic_shell_integral(sym, t, R, combos[c]) / std::pow(R, expo);
        finite = finite && std::isfinite(ratio);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        table.push_back({{"combo", c}, {"t", t}, {"R", R}, {"ratio", ratio}});
      }
    sup = std::max(sup, hi);
    rep.set("combo" + std::to_string(c) + "_exponent", expo);
    rep.set("combo" + std::to_string(c) + "_min_ratio", lo);
    rep.set("combo" + std::to_string(c) + "_max_ratio", hi);
  }
  rep.set("sup_ratio", sup);
  rep.values["ratios"] = table;
  rep.passed = finite;
  if (nu_inverse) {
    rep.set("nu_inverse", *nu_inverse);
    rep.passed = rep.passed && sup <= *nu_inverse * (1.0 + tol_rel);
  }
  return rep;
}

std::vector<std::vector<double>> frequency_sample_grid(int d, double r_min, double r_max, int radii, int directions) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < radii; ++i) {
    const double r = (radii == 1) ? r_min : r_min * std::pow(r_max / r_min, static_cast<double>(i) / (radii - 1));
    if (d == 1) {
      out.push_back({r});
      out.push_back({-r});
    } else if (d == 2) {
      for (int k = 0; k < directions; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.25) / directions;
        out.push_back({r * std::cos(th), r * std::sin(th)});
      }
    } else {
      // Fibonacci lattice on the sphere.
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int k = 0; k < directions; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / directions;
        const double rho = std::sqrt(1.0 - z * z);
        out.push_back({r * rho * std::cos(golden * k), r * rho * std::sin(golden * k), r * z});
      }
    }
  }
  return out;
}

}  // namespace spdelab

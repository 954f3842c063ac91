#include "spdelab/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace spdelab {

BernsteinFunction::BernsteinFunction(std::string label, std::function<double(double)> f,
                                     std::optional<ScalingExponents> claim, bool identity)
    : label_(std::move(label)), f_(std::move(f)), claim_(claim), identity_(identity) {}

double BernsteinFunction::operator()(double lambda) const {
  if (lambda == 0.0) return 0.0;
  if (!(lambda >= kLambdaMin) || !(lambda <= kLambdaMax)) {
    std::ostringstream msg;
    msg << "bernstein " << label_ << ": lambda = " << lambda << " outside the evaluable range [1e-12, 1e12]";
    throw Error(msg.str());
  }
  if (identity_) return lambda;
  return f_(lambda);
}

namespace {

// log(cosh x), accurate for small and large x.
double log_cosh(double x) {
  if (x < 20.0) {
    const double s = std::sinh(0.5 * x);
    return std::log1p(2.0 * s * s);
  }
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

// log(sinh(sqrt l) / sqrt l).
double log_sinhc_sqrt(double lambda) {
  if (lambda < 1e-6) return lambda / 6.0 - lambda * lambda / 180.0;
  const double x = std::sqrt(lambda);
  if (x < 1.0) {
    // sinh(x)/x - 1 = sum_{k>=1} x^{2k} / (2k+1)!
    double term = 1.0, excess = 0.0;
    for (int k = 1; k <= 12; ++k) {
      term *= lambda / ((2.0 * k) * (2.0 * k + 1.0));
      excess += term;
    }
    return std::log1p(excess);
  }
  if (x < 20.0) return std::log(std::sinh(x) / x);
  return x - std::log(2.0 * x) + std::log1p(-std::exp(-2.0 * x));
}

std::string fmt_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_open_unit(double v, const char* what) {
  if (!(v > 0.0) || !(v < 1.0)) throw Error(std::string("bernstein catalog: ") + what + " must lie in (0, 1)");
}

}  // namespace

BernsteinFunction bernstein_power(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) throw Error("bernstein power: exponent must lie in (0, 1]");
  if (alpha == 1.0) return BernsteinFunction("power:1", [](double l) { return l; }, ScalingExponents{1.0, 1.0}, true);
  return BernsteinFunction("power:" + fmt_param(alpha), [alpha](double l) { return std::pow(l, alpha); },
                           ScalingExponents{alpha, alpha});
}

BernsteinFunction bernstein_catalog(int id, const std::vector<double>& params) {
  const std::size_t want = (id == 5 || id == 6) ? 1 : 2;
  if (id < 1 || id > 6) throw Error("bernstein catalog: id must be 1..6");
  if (params.size() != want) {
    throw Error("bernstein catalog: member " + std::to_string(id) + " takes " + std::to_string(want) +
                " parameter(s)");
  }
  const double a = params[0];
  const double b = want == 2 ? params[1] : 0.0;
  std::string label = std::to_string(id) + ":" + fmt_param(a) + (want == 2 ? ":" + fmt_param(b) : "");
  switch (id) {
    case 1:
      require_open_unit(a, "alpha");
      require_open_unit(b, "beta");
      if (!(a < b)) throw Error("bernstein catalog: member 1 needs alpha < beta");
      return BernsteinFunction(label, [a, b](double l) { return std::pow(l, a) + std::pow(l, b); },
                               ScalingExponents{a, b});
    case 2:
      require_open_unit(a, "alpha");
      require_open_unit(b, "beta");
      return BernsteinFunction(label, [a, b](double l) { return std::pow(l + std::pow(l, a), b); },
                               ScalingExponents{a * b, b});
    case 3:
      require_open_unit(a, "alpha");
      if (!(b > 0.0) || !(b < 1.0 - a)) throw Error("bernstein catalog: member 3 needs beta in (0, 1 - alpha)");
      return BernsteinFunction(label, [a, b](double l) { return std::pow(l, a) * std::pow(std::log1p(l), b); },
                               ScalingExponents{a, a + b});
    case 4:
      require_open_unit(a, "alpha");
      if (!(b > 0.0) || !(b < a)) throw Error("bernstein catalog: member 4 needs beta in (0, alpha)");
      return BernsteinFunction(label, [a, b](double l) { return std::pow(l, a) * std::pow(std::log1p(l), -b); },
                               ScalingExponents{a - b, a});
    case 5:
      require_open_unit(a, "alpha");
      return BernsteinFunction(label, [a](double l) { return std::pow(log_cosh(std::sqrt(l)), a); },
                               ScalingExponents{0.5 * a, a});
    default:
      require_open_unit(a, "alpha");
      return BernsteinFunction(label, [a](double l) { return std::pow(log_sinhc_sqrt(l), a); },
                               ScalingExponents{0.5 * a, a});
  }
}

BernsteinFunction bernstein_from_id(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw Error("bernstein: empty id");
  std::vector<double> params;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(parts[i], &used));
      if (used != parts[i].size()) throw Error("");
    } catch (...) {
      throw Error("bernstein: invalid parameter '" + parts[i] + "' in '" + spec + "'");
    }
  }
  const std::string& family = parts[0];
  if (family == "power") {
    if (params.size() != 1) throw Error("bernstein: power takes one parameter");
    return bernstein_power(params[0]);
  }
  static const std::vector<std::string> names = {"alpha-beta", "nested", "log-up", "log-down", "log-cosh",
                                                 "log-sinh"};
  for (std::size_t i = 0; i < names.size(); ++i)
    if (family == names[i] || family == std::to_string(i + 1))
      return bernstein_catalog(static_cast<int>(i) + 1, params);
  throw Error("bernstein: unknown family '" + family + "'");
}

double generalized_inverse(const BernsteinFunction& phi, double t) {
  if (!(t > 0.0)) throw Error("generalized_inverse: t must be positive");
  if (phi.is_identity()) {
    if (t > kLambdaMax || t < kLambdaMin) throw Error("generalized_inverse: t beyond the evaluable range");
    return t;
  }
  if (!(t > phi(kLambdaMin)) || !(t <= phi(kLambdaMax))) {
    std::ostringstream msg;
    msg << "generalized_inverse: t = " << t << " beyond the evaluable range of " << phi.label();
    throw Error(msg.str());
  }
  double lo = std::log(kLambdaMin);
  double hi = std::log(kLambdaMax);
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phi(std::exp(mid)) >= t) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::exp(hi);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw Error("log_grid: need 0 < lo < hi and at least two points");
  std::vector<double> out(points);
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

namespace {

std::pair<double, double> envelope(const std::vector<double>& x, const std::vector<double>& y) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (!(x[j] > x[i])) continue;
      const double e = std::log(y[j] / y[i]) / std::log(x[j] / x[i]);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  return {lo, hi};
}

}  // namespace

CheckReport scaling_check(const BernsteinFunction& phi, const std::vector<double>& grid, double tol) {
  if (grid.size() < 2) throw Error("scaling_check: grid needs at least two points");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() / sorted.front() < 1e12) throw Error("scaling_check: grid must span at least 12 decades");

  std::vector<double> values(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) values[i] = phi(sorted[i]);
  const auto [d1, d2] = envelope(sorted, values);

  // Inverse envelope on the image grid.
  const std::vector<double> targets = log_grid(values.front(), values.back(), static_cast<int>(sorted.size()));
  std::vector<double> inverse(targets.size());
  std::vector<double> usable_t, usable_inv;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(targets[i] > phi(kLambdaMin))) continue;
    usable_t.push_back(targets[i]);
    usable_inv.push_back(generalized_inverse(phi, targets[i]));
  }
  const auto [id1, id2] = envelope(usable_t, usable_inv);

  CheckReport rep;
  rep.name = "scaling:" + phi.label();
  rep.set("delta1_hat", d1);
  rep.set("delta2_hat", d2);
  rep.set("inverse_delta1_hat", id1);
  rep.set("inverse_delta2_hat", id2);
  rep.set("tol", tol);
  rep.passed = std::isfinite(d1) && std::isfinite(d2) && d1 > 0.0 && d1 <= d2 && id1 <= id2;
  if (const auto& c = phi.claim()) {
    rep.set("delta1_claim", c->lower);
    rep.set("delta2_claim", c->upper);
    rep.set("inverse_delta1_claim", 1.0 / c->upper);
    rep.set("inverse_delta2_claim", 1.0 / c->lower);
    rep.passed = rep.passed && std::abs(d1 - c->lower) <= tol && std::abs(d2 - c->upper) <= tol &&
                 std::abs(id1 - 1.0 / c->upper) <= tol && std::abs(id2 - 1.0 / c->lower) <= tol;
  } else {
    rep.note("no claimed exponents; envelope reported only");
  }
  return rep;
}

CheckReport h_conditions_check(const BernsteinFunction& phi, const std::vector<double>& lambdas,
                               const std::vector<double>& ts) {
  const auto& claim = phi.claim();
  if (!claim) throw Error("h_conditions_check: exponents must be claimed");
  const double d1 = claim->lower, d2 = claim->upper;
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0, c3 = 0.0;
  for (double l : lambdas)
    for (double t : ts) {
      if (l >= 1.0 && t >= 1.0 && l * t <= kLambdaMax) {
        const double r = phi(l * t) / phi(t);
        c1 = std::min(c1, r / std::pow(l, d1));
        c2 = std::max(c2, r / std::pow(l, d2));
      }
      if (l <= 1.0 && t <= 1.0 && l * t >= kLambdaMin) {
        c3 = std::max(c3, phi(l * t) / phi(t) / std::pow(l, d1));
      }
    }
  CheckReport rep;
  rep.name = "h-conditions:" + phi.label();
  rep.set("delta1", d1);
  rep.set("delta2", d2);
  rep.set("delta3", d1);
  rep.set("c1", c1);
  rep.set("c2", c2);
  rep.set("c3", c3);
  rep.passed = d1 > 0.0 && d1 <= d2 && d2 < 1.0 && c1 > 0.0 && std::isfinite(c1) && std::isfinite(c2) &&
               c2 > 0.0 && std::isfinite(c3) && c3 > 0.0;
  if (d2 >= 1.0) rep.note("upper exponent equals 1: (H1) needs delta2 < 1");
  return rep;
}

CheckReport bernstein_invariants(const BernsteinFunction& phi) {
  const auto grid = log_grid(1e-8, 1e8, 10000);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = phi(grid[i]);

  bool monotone = true, concave = true;
  double prev_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (v[i + 1] < v[i]) monotone = false;
    const double slope = (v[i + 1] - v[i]) / (grid[i + 1] - grid[i]);
    if (slope > prev_slope * (1.0 + 1e-9) + 1e-300) concave = false;
    prev_slope = slope;
  }
  const double zero_ratio = phi(1e-12) / phi(1.0);
  const double lower = phi.claim() ? phi.claim()->lower : 1.0;
  const bool zero_ok = zero_ratio <= 1e-6 || zero_ratio <= 10.0 * std::pow(1e-12, lower);

  CheckReport rep;
  rep.name = "bernstein-invariants:" + phi.label();
  rep.values["monotone"] = monotone;
  rep.values["concave"] = concave;
  rep.set("phi_1e-12_over_phi_1", zero_ratio);
  rep.set("phi_at_range_min", phi(kLambdaMin));
  rep.set("phi_at_range_max", phi(kLambdaMax));
  if (zero_ratio > 1e-6) rep.note("phi(1e-12)/phi(1) above 1e-6; accepted against the power-law bound 10 (1e-12)^delta1");
  const bool limits = phi(kLambdaMin) < 1e-2 * phi(1.0) && phi(kLambdaMax) > 1e2 * phi(1.0);
  rep.values["limits"] = limits;
  rep.passed = monotone && concave && zero_ok && limits;
  return rep;
}

double inverse_doubling_constant(const BernsteinFunction& phi) {
  const double lo = std::max(2.0 * phi(kLambdaMin), phi(1e-8)) * 1.0000001;
  const double hi = phi(1e8);
  double best = 0.0;
  for (double a : log_grid(lo, hi, 401))
    best = std::max(best, generalized_inverse(phi, a) / generalized_inverse(phi, 0.5 * a));
  return best;
}

namespace {

class SubordinateModel final : public SymbolModel {
 public:
  explicit SubordinateModel(BernsteinFunction phi) : phi_(std::move(phi)) {}
  Cplx evaluate(double, Point xi) const override { return {-phi_(norm2(xi)), 0.0}; }
  Cplx integral(double s, double t, Point xi) const override { return {-(t - s) * phi_(norm2(xi)), 0.0}; }
  Flow flow(double s, double t) const override {
    return [this, s, t](Point xi) { return Cplx{-(t - s) * phi_(norm2(xi)), 0.0}; };
  }
  bool closed_form_integral() const override { return true; }
  std::optional<double> half_power(Point xi) const override { return std::sqrt(phi_(norm2(xi))); }

 private:
  BernsteinFunction phi_;
};

}  // namespace

Symbol subordinate_symbol(const BernsteinFunction& phi, int d, std::string id) {
  if (id.empty()) id = "subord:" + phi.label();
  const auto claim = phi.claim();
  const double order = claim ? 2.0 * claim->upper : 2.0;
  const bool homogeneous = claim && claim->lower == claim->upper;
  SymbolInfo info{std::move(id), "subordinate Brownian motion: -phi(|xi|^2)", d, order, homogeneous ? 1.0 : 0.0,
                  false, homogeneous};
  return Symbol(info, std::make_shared<SubordinateModel>(phi));
}

}  // namespace spdelab

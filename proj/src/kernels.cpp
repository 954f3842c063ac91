#include "spdelab/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spdelab/parallel.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::p:
      return "p";
    case KernelKind::frac_p:
      return "frac_p";
    case KernelKind::grad_frac_p:
      return "grad_frac_p";
    case KernelKind::q1:
      return "q1";
    case KernelKind::q2:
      return "q2";
  }
  return "unknown";
}

Multiplier unit_multiplier() {
  return [](Point) { return Cplx{1.0, 0.0}; };
}

Multiplier power_multiplier(double power) {
  if (power < 0.0) throw Error("power multiplier: exponent must be nonnegative");
  if (power == 0.0) return unit_multiplier();
  return [power](Point xi) {
    const double r2 = norm2(xi);
    return Cplx{r2 == 0.0 ? 0.0 : std::pow(r2, 0.5 * power), 0.0};
  };
}

Multiplier half_power_multiplier(const Symbol& sym) {
  return [sym](Point xi) { return Cplx{sym.half_power(xi), 0.0}; };
}

Multiplier gradient_multiplier(const Symbol& sym, int axis) {
  if (axis < 0 || axis >= sym.dim()) throw Error("gradient multiplier: axis out of range");
  return [sym, axis](Point xi) { return Cplx{0.0, xi[axis]} * sym.half_power(xi); };
}

HalfPowerPropagator::HalfPowerPropagator(const Symbol& sym, const SpaceTimeGrid& grid)
    : sym_(sym), grid_(grid) {
  if (sym.dim() != grid.dim()) throw Error("propagator: symbol and grid dimensions differ");
  const std::size_t N = grid.points();
  multiplier_.resize(N);
  for (std::size_t k = 0; k < N; ++k)
    multiplier_[k] = grid.is_nyquist(k) ? Cplx{0.0, 0.0} : Cplx{sym.half_power(grid.frequency(k)), 0.0};
  homogeneous_ = !sym.info().time_dependent && sym.has_closed_form_integral();
  if (homogeneous_) {
    const Flow f = sym.flow(0.0, 1.0);
    unit_flow_.resize(N);
    for (std::size_t k = 0; k < N; ++k) unit_flow_[k] = f(grid.frequency(k));
  }
}

std::vector<Cplx> HalfPowerPropagator::operator()(double r, double t) const {
  const std::size_t N = grid_.points();
  std::vector<Cplx> out(N, Cplx{0.0, 0.0});
  if (r >= t) return out;
  if (homogeneous_) {
    const double tau = t - r;
    for (std::size_t k = 0; k < N; ++k)
      if (multiplier_[k] != Cplx{0.0, 0.0}) out[k] = multiplier_[k] * std::exp(tau * unit_flow_[k]);
  } else {
    const Flow f = sym_.flow(r, t);
    for (std::size_t k = 0; k < N; ++k)
      if (multiplier_[k] != Cplx{0.0, 0.0}) out[k] = multiplier_[k] * std::exp(f(grid_.frequency(k)));
  }
  return out;
}

namespace {

void require_ordered(double s, double t, const char* what) {
  if (!(s < t)) throw Error(std::string(what) + ": requires s < t");
}

// Fills out[k] = f(k) for every lattice index, in chunks.
void fill_indexed(std::vector<Cplx>& out, const std::function<Cplx(std::size_t)>& f) {
  const std::size_t chunk = 512;
  const std::size_t chunks = (out.size() + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(out.size(), (c + 1) * chunk);
    for (std::size_t k = c * chunk; k < end; ++k) out[k] = f(k);
  });
}

KernelField make_field(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid, KernelKind kind,
                       std::vector<Cplx> spectrum) {
  KernelField kf{grid, std::move(spectrum), {}, s, t, kind, sym.id()};
  kf.values = synthesize(grid, kf.spectrum);
  return kf;
}

double l1_of(const SpaceTimeGrid& grid, const std::vector<Cplx>& values) {
  std::vector<double> mags(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mags[i] = std::abs(values[i]);
  return pairwise_sum(mags) * grid.cell_volume();
}

}  // namespace

std::vector<Cplx> kernel_spectrum(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid,
                                  const Multiplier& m) {
  if (sym.dim() != grid.dim()) throw Error("kernel: symbol and grid dimensions differ");
  const Flow flow = sym.flow(s, t);
  std::vector<Cplx> spec(grid.points());
  fill_indexed(spec, [&](std::size_t k) -> Cplx {
    if (grid.is_nyquist(k)) return {0.0, 0.0};
    const Point xi = grid.frequency(k);
    const Cplx mult = m(xi);
    if (mult == Cplx{0.0, 0.0}) return {0.0, 0.0};
    return mult * std::exp(flow(xi));
  });
  return spec;
}

double KernelField::mass() const {
  std::vector<double> re(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) re[i] = values[i].real();
  return pairwise_sum(re) * grid.cell_volume();
}

double KernelField::l1_norm() const { return l1_of(grid, values); }

double KernelField::max_norm() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double KernelField::max_imag() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

double KernelField::l2_norm_squared() const {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = std::norm(values[i]);
  return pairwise_sum(sq) * grid.cell_volume();
}

double KernelField::plancherel_l2_squared() const {
  std::vector<double> sq(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) sq[i] = std::norm(spectrum[i]);
  return pairwise_sum(sq) / grid.box_volume();
}

Json KernelField::metadata() const {
  Json j;
  j["symbol_id"] = symbol_id;
  j["kind"] = to_string(kind);
  j["s"] = s;
  j["t"] = t;
  j["grid"] = {{"L", grid.half_width()}, {"n", grid.n()}, {"d", grid.dim()}};
  j["mass"] = mass();
  j["max_norm"] = max_norm();
  j["max_imag"] = max_imag();
  return j;
}

KernelField kernel_field(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid) {
  require_ordered(s, t, "kernel_field");
  return make_field(sym, s, t, grid, KernelKind::p, kernel_spectrum(sym, s, t, grid, unit_multiplier()));
}

KernelField frac_power_kernel(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid, double power) {
  require_ordered(s, t, "frac_power_kernel");
  return make_field(sym, s, t, grid, KernelKind::frac_p, kernel_spectrum(sym, s, t, grid, power_multiplier(power)));
}

KernelField half_power_kernel(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid) {
  require_ordered(s, t, "half_power_kernel");
  return make_field(sym, s, t, grid, KernelKind::frac_p, kernel_spectrum(sym, s, t, grid, half_power_multiplier(sym)));
}

KernelField gradient_kernel(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid, int axis) {
  require_ordered(s, t, "gradient_kernel");
  return make_field(sym, s, t, grid, KernelKind::grad_frac_p,
                    kernel_spectrum(sym, s, t, grid, gradient_multiplier(sym, axis)));
}

std::pair<KernelField, KernelField> scaled_kernels_q(const Symbol& sym, double s, double t,
                                                     const SpaceTimeGrid& grid) {
  require_ordered(s, t, "scaled_kernels_q");
  if (sym.dim() != grid.dim()) throw Error("scaled_kernels_q: symbol and grid dimensions differ");
  const double tau = t - s;
  const double g = sym.order();
  const double shrink = std::pow(tau, -1.0 / g);
  const Flow flow = sym.flow(s, t);
  const int d = grid.dim();
  std::vector<Cplx> spec1(grid.points()), spec2(grid.points());
  const std::size_t chunk = 512;
  const std::size_t chunks = (grid.points() + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::array<double, 3> eta{0.0, 0.0, 0.0};
    const std::size_t end = std::min(grid.points(), (c + 1) * chunk);
    for (std::size_t k = c * chunk; k < end; ++k) {
      if (grid.is_nyquist(k)) {
        spec1[k] = spec2[k] = {0.0, 0.0};
        continue;
      }
      const Point xi = grid.frequency(k);
      for (int a = 0; a < d; ++a) eta[a] = shrink * xi[a];
      const Point scaled(eta.data(), d);
      const Cplx e = std::exp(flow(scaled));
      spec1[k] = e;
      const double r2 = norm2(xi);
      const double mult = r2 == 0.0 ? 0.0 : std::pow(r2, 0.25 * g);
      spec2[k] = tau * sym(t, scaled) * mult * e;
    }
  });
  return {make_field(sym, s, t, grid, KernelKind::q1, std::move(spec1)),
          make_field(sym, s, t, grid, KernelKind::q2, std::move(spec2))};
}

double l1_tail(const KernelField& kf, double c) {
  if (c < 0.0) throw Error("l1_tail: radius must be nonnegative");
  std::vector<double> mags(kf.values.size(), 0.0);
  const double c2 = c * c;
  for (std::size_t i = 0; i < kf.values.size(); ++i)
    if (norm2(kf.grid.coordinate(i)) >= c2) mags[i] = std::abs(kf.values[i]);
  return pairwise_sum(mags) * kf.grid.cell_volume();
}

bool tail_truncated(const KernelField& kf, double c) { return c > kf.grid.half_width(); }

namespace {

std::vector<int> lattice_steps(const SpaceTimeGrid& grid, std::span<const double> h) {
  if (static_cast<int>(h.size()) != grid.dim()) throw Error("translation: shift has wrong dimension");
  std::vector<int> steps(h.size());
  for (std::size_t a = 0; a < h.size(); ++a) {
    const double q = h[a] / grid.dx();
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
      throw Error("translation: shift must be a multiple of the grid spacing (no interpolation)");
    steps[a] = static_cast<int>(static_cast<long long>(r) % grid.n());
  }
  return steps;
}

double translation_l1(const SpaceTimeGrid& grid, const std::vector<Cplx>& values, const std::vector<int>& steps) {
  std::vector<double> mags(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mags[i] = std::abs(values[grid.shifted(i, steps)] - values[i]);
  return pairwise_sum(mags) * grid.cell_volume();
}

}  // namespace

double translation_difference_l1(const KernelField& kf, std::span<const double> h) {
  return translation_l1(kf.grid, kf.values, lattice_steps(kf.grid, h));
}

double time_difference_l1(const Symbol& sym, double r, double s, double t, const SpaceTimeGrid& grid,
                          KernelKind kind) {
  if (!(r < s) || !(s <= t)) throw Error("time_difference_l1: requires r < s <= t");
  if (s == t) return 0.0;
  Multiplier m;
  if (kind == KernelKind::p) {
    m = unit_multiplier();
  } else if (kind == KernelKind::frac_p) {
    m = half_power_multiplier(sym);
  } else {
    throw Error("time_difference_l1: kind must be p or frac_p");
  }
  auto late = kernel_spectrum(sym, r, t, grid, m);
  const auto early = kernel_spectrum(sym, r, s, grid, m);
  for (std::size_t k = 0; k < late.size(); ++k) late[k] -= early[k];
  return l1_of(grid, synthesize(grid, std::move(late)));
}

CheckReport check_scaling_relations(const Symbol& sym, double s, double t, const SpaceTimeGrid& grid, int samples,
                                    std::uint64_t seed, double tol) {
  require_ordered(s, t, "check_scaling_relations");
  const double tau = t - s;
  const double g = sym.order();
  const int d = grid.dim();
  const Multiplier half = power_multiplier(0.5 * g);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.points() - 1);
  std::vector<std::size_t> idx(samples);
  for (auto& i : idx) i = pick(rng);

  // (-Delta)^{g/4} q1 on the working grid.
  const auto [q1, q2_unused] = scaled_kernels_q(sym, s, t, grid);
  std::vector<Cplx> frac_q1 = q1.spectrum;
  for (std::size_t k = 0; k < frac_q1.size(); ++k) frac_q1[k] *= half(grid.frequency(k));
  const auto rhs57 = synthesize(grid, frac_q1);

  // (-Delta)^{g/4} p on the dilated grid, evaluated off-grid by direct summation.
  const SpaceTimeGrid dilated(grid.half_width() * std::pow(tau, 1.0 / g), grid.n(), d);
  const auto p_spec = kernel_spectrum(sym, s, t, dilated, half);
  const double pre57 = std::pow(tau, d / g) * std::sqrt(tau);

  // d/dt by a fourth-order central difference on the working grid.
  const double h = 1e-3 * tau;
  std::vector<Cplx> deriv(grid.points(), Cplx{0.0, 0.0});
  const double weights[4] = {1.0, -8.0, 8.0, -1.0};
  const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
  for (int j = 0; j < 4; ++j) {
    const auto spec = kernel_spectrum(sym, s, t + offsets[j] * h, grid, half);
    for (std::size_t k = 0; k < spec.size(); ++k) deriv[k] += weights[j] / (12.0 * h) * spec[k];
  }
  const auto lhs58 = synthesize(grid, deriv);

  // q2 on the contracted grid.
  const double contract = std::pow(tau, -1.0 / g);
  const SpaceTimeGrid contracted(grid.half_width() * contract, grid.n(), d);
  const auto q_small = scaled_kernels_q(sym, s, t, contracted);
  const double pre58 = std::pow(tau, -d / g) * std::pow(tau, -1.5);

  double diff57 = 0.0, ref57 = 0.0, diff58 = 0.0, ref58 = 0.0;
  std::array<double, 3> y{0.0, 0.0, 0.0};
  for (std::size_t i : idx) {
    const Point x = grid.coordinate(i);
    for (int a = 0; a < d; ++a) y[a] = std::pow(tau, 1.0 / g) * x[a];
    const Cplx lhs = pre57 * evaluate_series(dilated, p_spec, Point(y.data(), d));
    diff57 = std::max(diff57, std::abs(lhs - rhs57[i]));
    ref57 = std::max(ref57, std::abs(rhs57[i]));

    for (int a = 0; a < d; ++a) y[a] = contract * x[a];
    const Cplx rhs = pre58 * evaluate_series(contracted, q_small.second.spectrum, Point(y.data(), d));
    diff58 = std::max(diff58, std::abs(lhs58[i] - rhs));
    ref58 = std::max(ref58, std::abs(rhs));
  }
  CheckReport rep;
  rep.name = "scaling-relations:" + sym.id();
  rep.set("tau", tau);
  rep.set("samples", samples);
  rep.set("residual_q1_relation", diff57 / ref57);
  rep.set("residual_q2_relation", diff58 / ref58);
  rep.set("tol", tol);
  rep.note("time-derivative relation uses the factor tau^{-d/g} tau^{-3/2} implied by the q2 definition");
  rep.passed = diff57 <= tol * ref57 && diff58 <= tol * ref58;
  return rep;
}

// ---------------------------------------------------------------------------
// Lemma checks

double lemma_delta(double gamma) { return 0.25 * std::min(1.0, gamma); }

namespace {

QuadRule smooth_rule(double lo, double hi, int panels) {
  QuadRule rule;
  const double w = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p)
    for (const auto& q : gauss_legendre(8, lo + p * w, lo + (p + 1) * w)) rule.push_back(q);
  return rule;
}

// sum_i w_i v_i[j] for each j, in node order.
std::vector<double> weighted_columns(const QuadRule& rule, const std::vector<std::vector<double>>& per_node,
                                     std::size_t columns) {
  std::vector<double> out(columns, 0.0);
  std::vector<double> terms(rule.size());
  for (std::size_t j = 0; j < columns; ++j) {
    for (std::size_t i = 0; i < rule.size(); ++i) terms[i] = rule[i].w * per_node[i][j];
    out[j] = pairwise_sum(terms);
  }
  return out;
}

}  // namespace

std::vector<double> lemma_left_sides(const Symbol& sym, const SpaceTimeGrid& grid, LemmaKind kind,
                                     const LemmaSweep& sweep) {
  const std::size_t m = sweep.points.size();
  const Multiplier half = half_power_multiplier(sym);
  std::vector<std::vector<double>> per_node;
  QuadRule rule;

  if (kind == LemmaKind::tail) {
    require_ordered(sweep.s, sweep.t, "lemma (tail)");
    rule = clustered(sweep.s, sweep.t, sweep.t, sweep.cluster);
    per_node.assign(rule.size(), std::vector<double>(m));
    parallel_for(rule.size(), [&](std::size_t i) {
      const auto values = synthesize(grid, kernel_spectrum(sym, rule[i].x, sweep.t, grid, half));
      const KernelField kf{grid, {}, values, rule[i].x, sweep.t, KernelKind::frac_p, sym.id()};
      for (std::size_t j = 0; j < m; ++j) {
        const double v = l1_tail(kf, sweep.points[j]);
        per_node[i][j] = v * v;
      }
    });
  } else if (kind == LemmaKind::translation) {
    if (!(sweep.a > 0.0) || !(sweep.a < sweep.t)) throw Error("lemma (translation): requires 0 < a < t");
    rule = smooth_rule(0.0, sweep.a, sweep.smooth_panels);
    std::vector<std::vector<int>> steps;
    for (double h : sweep.points) {
      std::vector<double> shift(grid.dim(), 0.0);
      shift[0] = h;
      steps.push_back(lattice_steps(grid, shift));
    }
    per_node.assign(rule.size(), std::vector<double>(m));
    parallel_for(rule.size(), [&](std::size_t i) {
      const auto values = synthesize(grid, kernel_spectrum(sym, rule[i].x, sweep.t, grid, half));
      for (std::size_t j = 0; j < m; ++j) {
        const double v = translation_l1(grid, values, steps[j]);
        per_node[i][j] = v * v;
      }
    });
  } else {
    if (!(sweep.a > 0.0) || !(sweep.a < sweep.s)) throw Error("lemma (time): requires 0 < a < s");
    rule = smooth_rule(0.0, sweep.a, sweep.smooth_panels);
    per_node.assign(rule.size(), std::vector<double>(m));
    parallel_for(rule.size(), [&](std::size_t i) {
      const auto base = kernel_spectrum(sym, rule[i].x, sweep.s, grid, half);
      for (std::size_t j = 0; j < m; ++j) {
        if (!(sweep.points[j] > 0.0)) throw Error("lemma (time): gaps must be positive");
        auto spec = kernel_spectrum(sym, rule[i].x, sweep.s + sweep.points[j], grid, half);
        for (std::size_t k = 0; k < spec.size(); ++k) spec[k] -= base[k];
        const double v = l1_of(grid, synthesize(grid, std::move(spec)));
        per_node[i][j] = v * v;
      }
    });
  }
  return weighted_columns(rule, per_node, m);
}

LemmaSweep default_lemma_sweep(const std::string& lemma_id, const SpaceTimeGrid& grid) {
  LemmaSweep sweep;
  if (lemma_id == "mc1" || lemma_id == "615_1") {
    sweep.points = {1.0, 2.0, 4.0, 8.0};
  } else if (lemma_id == "mc2" || lemma_id == "615_2") {
    for (int k : {1, 2, 4, 8}) sweep.points.push_back(k * grid.dx());
  } else if (lemma_id == "mc3" || lemma_id == "615_3") {
    sweep.s = 1.0;
    sweep.t = 1.0;
    sweep.points = {1e-3, 2e-3, 4e-3, 8e-3};
  } else if (lemma_id == "freq") {
    sweep.points = {0.25, 0.5, 1.0, 2.0, 4.0};
  } else {
    throw Error("unknown lemma id '" + lemma_id + "'");
  }
  return sweep;
}

namespace {

struct Envelope {
  double slope;
  double min_ratio;
  double max_ratio;
};

Envelope fit_envelope(const std::vector<double>& x, const std::vector<double>& lhs, const std::vector<double>& rhs) {
  std::vector<double> lx, ly;
  Envelope e{0.0, std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(lhs[i]));
    const double r = lhs[i] / rhs[i];
    e.min_ratio = std::min(e.min_ratio, r);
    e.max_ratio = std::max(e.max_ratio, r);
  }
  e.slope = least_squares_slope(lx, ly);
  return e;
}

// |xi|^{g/2} F q1(s, s + tau)(xi) viewed as a symbol in xi.
class ScaledHalfPowerModel final : public SymbolModel {
 public:
  ScaledHalfPowerModel(Symbol sym, double s, double tau) : sym_(std::move(sym)), s_(s), tau_(tau) {}
  Cplx evaluate(double, Point xi) const override {
    const int d = sym_.dim();
    const double g = sym_.order();
    const double shrink = std::pow(tau_, -1.0 / g);
    std::array<double, 3> eta{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) eta[a] = shrink * xi[a];
    const double r2 = norm2(xi);
    if (r2 == 0.0) return {0.0, 0.0};
    return std::pow(r2, 0.25 * g) * std::exp(sym_.time_integral(s_, s_ + tau_, Point(eta.data(), d)));
  }

 private:
  Symbol sym_;
  double s_;
  double tau_;
};

double frequency_side_norm(const Symbol& sym, double s, double tau) {
  SymbolInfo info{"scaled-half-power", "", sym.dim(), sym.order(), 0.0, false, false};
  const Symbol wrapped(info, std::make_shared<ScaledHalfPowerModel>(sym, s, tau));
  double total = 0.0;
  for (const auto& alpha : multi_indices(sym.dim(), 0, sym.d0())) {
    const DyadicCombo combo{{alpha, 1}};
    for (int n = -10; n <= 8; ++n) total += dyadic_shell_integral(wrapped, 0.0, std::ldexp(1.0, n), combo);
  }
  return total;
}

}  // namespace

CheckReport verify_kernel_lemma(const Symbol& sym, const SpaceTimeGrid& grid, const std::string& lemma_id,
                                const LemmaSweep& sweep) {
  if (sweep.points.size() < 4) throw Error("verify_kernel_lemma: sweep needs at least 4 points");
  const double g = sym.order();
  const double delta = lemma_delta(g);
  std::vector<double> lhs, rhs;
  double exponent = 0.0;
  CheckReport rep;
  rep.name = "kernel-lemma:" + lemma_id + ":" + sym.id();

  if (lemma_id == "mc1") {
    exponent = -2.0 * delta;
    lhs = lemma_left_sides(sym, grid, LemmaKind::tail, sweep);
    const double scale = std::pow(sweep.t - sweep.s, 1.0 / g);
    for (double c : sweep.points) rhs.push_back(std::pow(scale / c, 2.0 * delta));
    bool truncated = false;
    for (double c : sweep.points) truncated = truncated || c > grid.half_width();
    if (truncated) rep.note("some radii exceed the box; their tails are truncated");
  } else if (lemma_id == "mc2") {
    exponent = 2.0;
    lhs = lemma_left_sides(sym, grid, LemmaKind::translation, sweep);
    for (double h : sweep.points) rhs.push_back(std::pow(h * std::pow(sweep.t - sweep.a, -1.0 / g), 2.0));
  } else if (lemma_id == "mc3") {
    exponent = 2.0;
    lhs = lemma_left_sides(sym, grid, LemmaKind::time, sweep);
    for (double gap : sweep.points) rhs.push_back(std::pow(gap / (sweep.s - sweep.a), 2.0));
  } else if (lemma_id == "freq") {
    exponent = 0.0;
    lhs.resize(sweep.points.size());
    parallel_for(sweep.points.size(),
                 [&](std::size_t i) { lhs[i] = frequency_side_norm(sym, sweep.s, sweep.points[i]); });
    rhs.assign(sweep.points.size(), 1.0);
    rep.note("frequency integral restricted to 2^-10 <= |xi| < 2^9");
  } else {
    throw Error("verify_kernel_lemma: unknown lemma id '" + lemma_id + "'");
  }

  bool finite = true;
  for (double v : lhs) finite = finite && std::isfinite(v) && v > 0.0;
  Json table = Json::array();
  for (std::size_t i = 0; i < lhs.size(); ++i)
    table.push_back({{"x", sweep.points[i]}, {"lhs", lhs[i]}, {"rhs", rhs[i]}, {"ratio", lhs[i] / rhs[i]}});
  rep.values["sweep"] = table;
  rep.set("delta", delta);
  rep.set("exponent", exponent);
  if (!finite) {
    rep.passed = false;
    rep.note("non-finite or vanishing left side");
    return rep;
  }
  const Envelope e = fit_envelope(sweep.points, lhs, rhs);
  rep.set("slope", e.slope);
  rep.set("envelope_min", e.min_ratio);
  rep.set("envelope_max", e.max_ratio);
  rep.set("envelope_spread", e.max_ratio / e.min_ratio);
  rep.values["slope_within_0.1"] = std::abs(e.slope - exponent) <= 0.1;
  rep.passed = e.slope <= exponent + 0.1 && e.max_ratio / e.min_ratio <= 10.0;
  return rep;
}

CheckReport verify_subordinate_lemma(const BernsteinFunction& phi, const SpaceTimeGrid& grid,
                                     const std::string& which, const LemmaSweep& sweep) {
  if (sweep.points.size() < 4) throw Error("verify_subordinate_lemma: sweep needs at least 4 points");
  const Symbol sym = subordinate_symbol(phi, grid.dim());
  LemmaKind kind;
  std::vector<double> rhs;
  if (which == "615_1") {
    kind = LemmaKind::tail;
    for (double c : sweep.points) rhs.push_back((sweep.t - sweep.s) * phi(1.0 / (c * c)));
  } else if (which == "615_2") {
    kind = LemmaKind::translation;
    const double inv = generalized_inverse(phi, 1.0 / (sweep.t - sweep.a));
    for (double h : sweep.points) rhs.push_back(h * h * inv);
  } else if (which == "615_3") {
    kind = LemmaKind::time;
    for (double gap : sweep.points) rhs.push_back(std::pow(gap / (sweep.s - sweep.a), 2.0));
  } else {
    throw Error("verify_subordinate_lemma: unknown lemma '" + which + "'");
  }
  const auto lhs = lemma_left_sides(sym, grid, kind, sweep);
  const auto lhs_fine = lemma_left_sides(sym, grid.refined(), kind, sweep);

  CheckReport rep;
  rep.name = "subordinate-lemma:" + which + ":" + phi.label();
  Json table = Json::array();
  bool finite = true;
  double drift = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    finite = finite && std::isfinite(lhs[i]) && lhs[i] > 0.0 && std::isfinite(lhs_fine[i]);
    drift = std::max(drift, std::abs(lhs_fine[i] / lhs[i] - 1.0));
    table.push_back({{"x", sweep.points[i]}, {"lhs", lhs[i]}, {"lhs_refined", lhs_fine[i]}, {"rhs", rhs[i]},
                     {"ratio", lhs[i] / rhs[i]}});
  }
  rep.values["sweep"] = table;
  rep.set("refinement_drift", drift);
  if (!finite) {
    rep.passed = false;
    rep.note("non-finite or vanishing left side");
    return rep;
  }
  const Envelope e = fit_envelope(sweep.points, lhs, rhs);
  rep.set("slope", e.slope);
  rep.set("envelope_min", e.min_ratio);
  rep.set("envelope_max", e.max_ratio);
  rep.set("envelope_spread", e.max_ratio / e.min_ratio);
  rep.passed = e.max_ratio / e.min_ratio <= 10.0 && drift < 0.1;
  return rep;
}

CheckReport verify_bernstein_kernel_bounds(const BernsteinFunction& phi, int d, const std::string& which, int n) {
  if (which != "as_ker" && which != "as_ker2" && which != "as_ker3")
    throw Error("verify_bernstein_kernel_bounds: unknown bound '" + which + "'");
  const Symbol sym = subordinate_symbol(phi, d);
  const auto times = log_grid(1e-2, 1e2, 9);
  const auto radii = log_grid(1.0 / 16.0, 16.0, 17);

  auto sup_ratio = [&](int points) {
    double sup = 0.0;
    for (double t : times) {
      const double inv = generalized_inverse(phi, 1.0 / t);
      const double width = 1.0 / std::sqrt(inv);
      const SpaceTimeGrid grid(64.0 * width, points, d);
      Multiplier m;
      if (which == "as_ker") {
        m = half_power_multiplier(sym);
      } else if (which == "as_ker2") {
        m = gradient_multiplier(sym, 0);
      } else {
        m = [&phi](Point xi) { return Cplx{std::pow(phi(norm2(xi)), 1.5), 0.0}; };
      }
      const auto values = synthesize(grid, kernel_spectrum(sym, 0.0, t, grid, m));
      for (double rel : radii) {
        const double target = rel * width;
        const long steps = std::lround(target / grid.dx());
        if (steps < 1) continue;
        const double x = steps * grid.dx();
        std::vector<int> shift(d, 0);
        shift[0] = static_cast<int>(steps);
        std::size_t origin = 0;
        {
          std::size_t stride = 1;
          for (int a = d - 1; a >= 0; --a) {
            origin += static_cast<std::size_t>(points / 2) * stride;
            stride *= points;
          }
        }
        const double lhs = std::abs(values[grid.shifted(origin, shift)]);
        const double far = std::sqrt(phi(1.0 / (x * x))) / std::pow(x, d);
        double rhs = 0.0;
        if (which == "as_ker") {
          rhs = std::min(std::pow(t, -0.5) * std::pow(inv, 0.5 * d), far);
        } else if (which == "as_ker2") {
          rhs = std::min(std::pow(t, -0.5) * std::pow(inv, 0.5 * (d + 1)), far / x);
        } else {
          rhs = std::min(std::pow(t, -1.5) * std::pow(inv, 0.5 * d), far / t);
        }
        sup = std::max(sup, lhs / rhs);
      }
    }
    return sup;
  };
  const double coarse = sup_ratio(n);
  const double fine = sup_ratio(2 * n);
  CheckReport rep;
  rep.name = "bernstein-kernel-bound:" + which + ":" + phi.label();
  rep.set("sup_ratio", coarse);
  rep.set("sup_ratio_refined", fine);
  rep.set("growth", fine / coarse - 1.0);
  rep.passed = std::isfinite(coarse) && std::isfinite(fine) && coarse > 0.0 && fine / coarse - 1.0 < 0.1;
  return rep;
}

}  // namespace spdelab

#include "spdelab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spdelab/kernels.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/random.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double space_distance(const SpaceTimePoint& X, const SpaceTimePoint& Y) {
  if (X.x.size() != Y.x.size()) throw Error("metric: points of different dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < X.x.size(); ++i) s += (X.x[i] - Y.x[i]) * (X.x[i] - Y.x[i]);
  return std::sqrt(s);
}

// Local log-log slope of phi between lambda and lambda * 10^{sign}.
double edge_slope(const BernsteinFunction& phi, double lambda, double other) {
  return std::log(phi(other) / phi(lambda)) / std::log(other / lambda);
}

}  // namespace

QuasiMetric parabolic_metric(double gamma) {
  if (!(gamma > 0.0 && gamma <= 2.0)) throw Error("parabolic_metric: gamma must lie in (0, 2]");
  QuasiMetric m;
  m.kind_ = QuasiMetric::Kind::parabolic;
  m.gamma_ = gamma;
  m.label_ = "parabolic(" + format_double(gamma) + ")";
  m.n_rho_ = std::max(1.0, std::pow(2.0, 1.0 / gamma - 1.0));
  m.c0_ = 4.0 * std::pow(2.0, 1.0 / gamma);
  return m;
}

QuasiMetric subordinate_metric(const BernsteinFunction& phi) {
  const auto grid = log_grid(kLambdaMin, kLambdaMax, 241);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(phi(grid[i]) > phi(grid[i - 1]))) throw Error("subordinate_metric: phi must be strictly increasing");
  QuasiMetric m;
  m.kind_ = QuasiMetric::Kind::subordinate;
  m.label_ = "subordinate(" + phi.label() + ")";
  m.phi_ = phi;
  const double n_phi = phi.is_identity() ? 2.0 : inverse_doubling_constant(phi);
  m.n_phi_ = n_phi;
  m.n_rho_ = std::max(1.0, std::sqrt(n_phi));
  m.c0_ = 4.0 * n_phi;
  m.gamma_ = phi.claim() ? 2.0 * phi.claim()->upper : 2.0;
  return m;
}

void QuasiMetric::override_hormander_constant(double c0) {
  if (!(c0 > 0.0)) throw Error("metric: C0 must be positive");
  c0_ = c0;
}

double QuasiMetric::inverse_phi(double a) const {
  const BernsteinFunction& phi = *phi_;
  if (phi.is_identity()) return a;
  const double lo = phi(kLambdaMin);
  const double hi = phi(kLambdaMax);
  if (a > hi) return kLambdaMax * std::pow(a / hi, 1.0 / edge_slope(phi, kLambdaMax, kLambdaMax / 10.0));
  if (a <= lo) return kLambdaMin * std::pow(a / lo, 1.0 / edge_slope(phi, kLambdaMin, kLambdaMin * 10.0));
  return generalized_inverse(phi, a);
}

double QuasiMetric::time_part(double gap) const {
  gap = std::abs(gap);
  if (gap == 0.0) return 0.0;
  if (kind_ == Kind::parabolic) return std::pow(gap, 1.0 / gamma_);
  return 1.0 / std::sqrt(inverse_phi(1.0 / gap));
}

double QuasiMetric::gap_for(double value) const {
  if (value < 0.0) throw Error("metric: negative time part");
  if (value == 0.0) return 0.0;
  if (kind_ == Kind::parabolic) return std::pow(value, gamma_);
  const BernsteinFunction& phi = *phi_;
  const double lambda = 1.0 / (value * value);
  double p;
  if (lambda > kLambdaMax)
    p = phi(kLambdaMax) * std::pow(lambda / kLambdaMax, edge_slope(phi, kLambdaMax, kLambdaMax / 10.0));
  else if (lambda < kLambdaMin)
    p = phi(kLambdaMin) * std::pow(lambda / kLambdaMin, edge_slope(phi, kLambdaMin, kLambdaMin * 10.0));
  else
    p = phi(lambda);
  return 1.0 / p;
}

double QuasiMetric::operator()(const SpaceTimePoint& X, const SpaceTimePoint& Y) const {
  return time_part(X.t - Y.t) + space_distance(X, Y);
}

// ---------------------------------------------------------------------------

double ball_volume(const QuasiMetric& rho, const SpaceTimePoint& center, double c, const SpaceTimeBox& box,
                   std::size_t samples, std::uint64_t seed) {
  const int d = box.d;
  if (static_cast<int>(center.x.size()) != d) throw Error("ball_volume: center dimension differs from box");
  if (samples == 0) throw Error("ball_volume: need at least one sample");
  const double g = rho.gap_for(c);
  std::vector<double> lo(d + 1), hi(d + 1);
  lo[0] = std::max(0.0, center.t - g);
  hi[0] = std::min(box.T, center.t + g);
  for (int i = 0; i < d; ++i) {
    lo[i + 1] = std::max(-box.L, center.x[i] - c);
    hi[i + 1] = std::min(box.L, center.x[i] + c);
  }
  double vol = 1.0;
  for (int i = 0; i <= d; ++i) vol *= std::max(0.0, hi[i] - lo[i]);
  if (vol == 0.0) return 0.0;
  std::mt19937_64 rng(seed);
  SpaceTimePoint z{0.0, std::vector<double>(d)};
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    z.t = lo[0] + (hi[0] - lo[0]) * uniform01(rng);
    for (int i = 0; i < d; ++i) z.x[i] = lo[i + 1] + (hi[i + 1] - lo[i + 1]) * uniform01(rng);
    if (rho(center, z) < c) ++hits;
  }
  return vol * static_cast<double>(hits) / static_cast<double>(samples);
}

namespace {

bool ball_inside(const QuasiMetric& rho, const SpaceTimePoint& X, double c, const SpaceTimeBox& box) {
  const double g = rho.gap_for(c);
  if (X.t - g < 0.0 || X.t + g > box.T) return false;
  for (double xi : X.x)
    if (xi - c < -box.L || xi + c > box.L) return false;
  return true;
}

}  // namespace

CheckReport doubling_check(const QuasiMetric& rho, double gamma_factor, const std::vector<SpaceTimePoint>& centers,
                           const std::vector<double>& c_list, const SpaceTimeBox& box, std::size_t samples,
                           std::uint64_t seed) {
  if (!(gamma_factor >= 1.0)) throw Error("doubling_check: gamma must be at least 1");
  CheckReport rep;
  rep.name = "doubling";
  rep.set("gamma", gamma_factor);
  rep.set("samples", static_cast<double>(samples));

  struct Job {
    std::size_t center;
    std::size_t radius;
  };
  std::vector<Job> jobs;
  std::size_t discarded = 0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = 0; j < c_list.size(); ++j) {
      if (ball_inside(rho, centers[i], gamma_factor * c_list[j], box))
        jobs.push_back({i, j});
      else
        ++discarded;
    }
  rep.set("discarded", static_cast<double>(discarded));
  if (discarded > 0) rep.note(std::to_string(discarded) + " (center, radius) pairs leave the box and were skipped");
  if (jobs.empty()) {
    rep.passed = false;
    rep.note("no ball fits inside the box");
    return rep;
  }

  auto run = [&](std::size_t n, std::uint64_t salt) {
    std::vector<double> ratio(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
      const auto& jb = jobs[k];
      const std::uint64_t base = derive_seed(seed ^ salt, k);
      const double c = c_list[jb.radius];
      const double small = ball_volume(rho, centers[jb.center], c, box, n, derive_seed(base, 0));
      const double large = ball_volume(rho, centers[jb.center], gamma_factor * c, box, n, derive_seed(base, 1));
      ratio[k] = small > 0.0 ? large / small : std::numeric_limits<double>::infinity();
    });
    return ratio;
  };
  const auto r1 = run(samples, 0);
  const auto r2 = run(2 * samples, 0x5bd1e995ULL);
  const double m1 = *std::max_element(r1.begin(), r1.end());
  const double m2 = *std::max_element(r2.begin(), r2.end());
  const double drift = std::abs(m2 - m1) / m2;
  rep.set("max_ratio", m1);
  rep.set("max_ratio_doubled", m2);
  rep.set("min_ratio", *std::min_element(r2.begin(), r2.end()));
  rep.set("drift", drift);
  Json table = Json::array();
  for (std::size_t k = 0; k < jobs.size(); ++k)
    table.push_back({{"center", jobs[k].center}, {"c", c_list[jobs[k].radius]}, {"ratio", r2[k]}});
  rep.values["ratios"] = table;
  rep.passed = std::isfinite(m2) && drift < 0.05;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Smallest time gap whose half-power kernel has boundary-mode amplitude
// |m(xi)| exp(-gap Re(-int psi)) below 1e-8 on the outermost lattice shell.
double resolved_gap(const Symbol& sym, const SpaceTimeGrid& grid) {
  const int d = grid.dim();
  const int n = grid.n();
  const double T = grid.horizon();
  const Flow f = sym.flow(0.0, T);
  const Multiplier m = half_power_multiplier(sym);
  double gap = 0.0;
  // Walk the shell where some axis index is +-(n/2 - 1).
  const std::size_t total = grid.points();
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (grid.is_nyquist(flat)) continue;
    const Point q = grid.frequency(flat);
    bool edge = false;
    for (int i = 0; i < d; ++i) edge = edge || std::abs(std::abs(q[i]) - grid.frequency_1d(n / 2 - 1)) < 1e-12 * std::abs(q[i]);
    if (!edge) continue;
    const double rate = -f(q).real() / T;
    const double amp = std::abs(m(q));
    if (!(rate > 0.0) || amp <= 1e-8) continue;
    gap = std::max(gap, std::log(amp / 1e-8) / rate);
  }
  return gap;
}

}  // namespace

double hormander_integral(const Symbol& sym, const QuasiMetric& rho, const SpaceTimePoint& X,
                          const SpaceTimePoint& Y, double T, const SpaceTimeGrid& grid,
                          const HormanderOptions& options) {
  const int d = grid.dim();
  if (sym.dim() != d || static_cast<int>(X.x.size()) != d || static_cast<int>(Y.x.size()) != d)
    throw Error("hormander_integral: dimension mismatch");
  if (!(X.t > 0.0 && Y.t > 0.0 && X.t <= T && Y.t <= T)) throw Error("hormander_integral: times must lie in (0, T]");
  const double dist = rho(X, Y);
  if (dist == 0.0) return 0.0;

  std::vector<double> h(d);
  for (int i = 0; i < d; ++i) h[i] = X.x[i] - Y.x[i];

  const HalfPowerPropagator prop(sym, grid);
  const double resolved = resolved_gap(sym, grid);
  const std::size_t N = grid.points();
  std::vector<double> radius(N);
  for (std::size_t k = 0; k < N; ++k) radius[k] = std::sqrt(norm2(grid.coordinate(k)));
  std::vector<Cplx> phase(N);
  for (std::size_t k = 0; k < N; ++k) {
    const Point xi = grid.frequency(k);
    double a = 0.0;
    for (int i = 0; i < d; ++i) a += xi[i] * h[i];
    phase[k] = std::polar(1.0, -a);
  }
  const double R = rho.hormander_constant() * dist;
  const double cell = grid.cell_volume();

  const bool x_later = X.t >= Y.t;
  auto inner = [&](double r, bool later_only) {
    auto pt = prop(r, X.t);
    auto ps = prop(r, Y.t);
    if (later_only) std::fill(x_later ? ps.begin() : pt.begin(), x_later ? ps.end() : pt.end(), Cplx{0.0, 0.0});
    std::vector<Cplx> spec(N);
    for (std::size_t k = 0; k < N; ++k) spec[k] = pt[k] - ps[k] * phase[k];
    const auto vals = synthesize(grid, std::move(spec));
    const double cut = R - rho.time_part(X.t - r);
    std::vector<double> a(N, 0.0);
    for (std::size_t k = 0; k < N; ++k)
      if (radius[k] >= cut) a[k] = std::abs(vals[k]);
    return pairwise_sum(a) * cell;
  };

  struct TimeNode {
    double r;
    double w;
    bool later_only;
  };
  const double lo_t = std::min(X.t, Y.t);
  const double hi_t = std::max(X.t, Y.t);
  std::vector<TimeNode> nodes;
  // Clustered rule up to the resolved gap before the singular end; the rest
  // of the segment takes the value at singular - resolved_gap.
  auto segment = [&](double lo, double singular, bool later_only) {
    const double hold = singular - resolved;
    const double hi = std::max(lo, hold);
    if (hi > lo)
      for (const auto& q : clustered(lo, hi, singular, options.cluster)) nodes.push_back({q.x, q.w, later_only});
    if (singular > hi) nodes.push_back({hold, singular - hi, later_only});
  };
  segment(0.0, lo_t, false);
  if (hi_t > lo_t) segment(lo_t, hi_t, true);
  std::vector<double> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double v = inner(nodes[i].r, nodes[i].later_only);
    terms[i] = nodes[i].w * v * v;
  });
  return pairwise_sum(terms);
}

PairSampler resolve_sampler(const QuasiMetric& rho, PairSampler sampler, const SpaceTimeGrid& grid) {
  if (sampler.rho_min == 0.0)
    sampler.rho_min = grid.half_width() / (rho.hormander_constant() * std::ldexp(1.0, sampler.scales));
  if (sampler.t_late == 0.0) sampler.t_late = 0.5 * grid.horizon();
  return sampler;
}

std::vector<SampledPair> sample_pairs(const QuasiMetric& rho, const PairSampler& requested,
                                      const SpaceTimeGrid& grid) {
  const PairSampler sampler = resolve_sampler(rho, requested, grid);
  if (sampler.scales < 2 || sampler.pairs_per_scale < 1) throw Error("sample_pairs: need >= 2 scales and >= 1 pair");
  if (!(sampler.rho_min > 0.0 && sampler.t_late > 0.0)) throw Error("sample_pairs: rho_min and t_late must be positive");
  const int d = grid.dim();
  const double dx = grid.dx();
  std::vector<SampledPair> out;
  for (int k = 0; k < sampler.scales; ++k) {
    const double r0 = sampler.rho_min * std::ldexp(1.0, k);
    for (int p = 0; p < sampler.pairs_per_scale; ++p) {
      std::mt19937_64 rng(derive_seed(sampler.seed, static_cast<std::uint64_t>(k) * 1000003ULL + p));
      bool ok = false;
      for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
        const double target = r0 * std::exp2(uniform01(rng));
        const double theta = uniform01(rng);
        std::vector<double> dir(d);
        double nn = 0.0;
        std::normal_distribution<double> gauss;
        do {
          nn = 0.0;
          for (auto& v : dir) {
            v = gauss(rng);
            nn += v * v;
          }
        } while (nn == 0.0);
        nn = std::sqrt(nn);
        SpaceTimePoint X{sampler.t_late, std::vector<double>(d, 0.0)};
        SpaceTimePoint Y{0.0, std::vector<double>(d, 0.0)};
        double space = 0.0;
        for (int i = 0; i < d; ++i) {
          Y.x[i] = std::trunc((1.0 - theta) * target * dir[i] / nn / dx) * dx;
          space += Y.x[i] * Y.x[i];
        }
        space = std::sqrt(space);
        const double gap = rho.gap_for(std::max(0.0, target - space));
        if (!(gap < sampler.t_late)) continue;
        Y.t = sampler.t_late - gap;
        if (uniform01(rng) < 0.5) std::swap(X.t, Y.t);
        const double actual = rho(X, Y);
        if (actual <= 0.0) continue;
        out.push_back({k, std::move(X), std::move(Y), actual});
        ok = true;
      }
      if (!ok) throw Error("sample_pairs: could not place a pair at scale " + std::to_string(k));
    }
  }
  return out;
}

CheckReport hormander_sup_estimate(const Symbol& sym, const QuasiMetric& rho, const PairSampler& requested, double T,
                                   const SpaceTimeGrid& grid, const HormanderOptions& options) {
  const PairSampler sampler = resolve_sampler(rho, requested, grid);
  CheckReport rep;
  rep.name = "hormander";
  rep.values["symbol"] = sym.id();
  rep.values["metric"] = rho.label();
  rep.set("C0", rho.hormander_constant());
  rep.set("N_rho", rho.triangle_constant());
  rep.set("gamma0", rho.gamma0());
  rep.set("T", T);
  rep.set("rho_min", sampler.rho_min);
  rep.set("t_late", sampler.t_late);
  const auto pairs = sample_pairs(rho, sampler, grid);
  const SpaceTimeGrid fine = grid.refined();
  std::vector<double> coarse(pairs.size()), refined(pairs.size());
  parallel_for(2 * pairs.size(), [&](std::size_t j) {
    const auto& pr = pairs[j / 2];
    if (j % 2 == 0)
      coarse[j / 2] = hormander_integral(sym, rho, pr.X, pr.Y, T, grid, options);
    else
      refined[j / 2] = hormander_integral(sym, rho, pr.X, pr.Y, T, fine, options);
  });

  const int S = sampler.scales;
  std::vector<double> scale_max(S, 0.0), scale_max_ref(S, 0.0), xs(S), ys(S);
  Json table = Json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int k = pairs[i].scale;
    scale_max[k] = std::max(scale_max[k], coarse[i]);
    scale_max_ref[k] = std::max(scale_max_ref[k], refined[i]);
    table.push_back({{"scale", k},
                     {"rho", pairs[i].rho},
                     {"t", pairs[i].X.t},
                     {"s", pairs[i].Y.t},
                     {"offset", std::sqrt(norm2(pairs[i].Y.x))},
                     {"value", coarse[i]},
                     {"value_refined", refined[i]}});
  }
  const double sup = *std::max_element(coarse.begin(), coarse.end());
  const double sup_ref = *std::max_element(refined.begin(), refined.end());
  bool finite = std::isfinite(sup) && std::isfinite(sup_ref);
  bool positive = true;
  Json per_scale = Json::array();
  for (int k = 0; k < S; ++k) {
    xs[k] = std::log(sampler.rho_min * std::ldexp(1.0, k));
    positive = positive && scale_max_ref[k] > 0.0;
    ys[k] = std::log(std::max(scale_max_ref[k], std::numeric_limits<double>::min()));
    per_scale.push_back({{"scale", k}, {"max", scale_max[k]}, {"max_refined", scale_max_ref[k]}});
  }
  const double slope = least_squares_slope(xs, ys);
  const double drift = sup_ref > 0.0 ? std::abs(sup_ref - sup) / sup_ref : 0.0;
  rep.set("sup", sup);
  rep.set("sup_refined", sup_ref);
  rep.set("refinement_drift", drift);
  rep.set("scale_slope", slope);
  rep.values["per_scale"] = per_scale;
  rep.values["pairs"] = table;
  if (!positive) rep.note("some scale has a vanishing maximum");
  rep.passed = finite && positive && drift < 0.1 && slope <= 0.1;
  return rep;
}

}  // namespace spdelab

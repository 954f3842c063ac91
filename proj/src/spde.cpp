#include "spdelab/spde.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "spdelab/kernels.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/random.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

NoiseEnsemble::NoiseEnsemble(std::uint64_t seed, std::size_t paths, int modes, int steps, double T)
    : seed_(seed), paths_(paths), modes_(modes), steps_(steps), T_(T) {
  if (paths < 2) throw Error("noise: need at least two paths");
  if (modes < 1) throw Error("noise: need at least one mode");
  if (steps < 1) throw Error("noise: need at least one step");
  if (!(T > 0.0)) throw Error("noise: horizon must be positive");
}

std::vector<double> NoiseEnsemble::increments(std::size_t path) const {
  if (path >= paths_) throw Error("noise: path index out of range");
  std::mt19937_64 rng(derive_seed(seed_, path));
  boost::random::normal_distribution<double> normal(0.0, std::sqrt(dt()));
  std::vector<double> out(static_cast<std::size_t>(steps_) * modes_);
  for (double& v : out) v = normal(rng);
  return out;
}

bool AdaptedProcess::is_zero(const SpaceTimeGrid& grid) const {
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    for (int k = 0; k < modes; ++k)
      for (std::size_t q = 0; q < grid.points(); ++q)
        if (profile(static_cast<int>(i), k, grid.coordinate(q)) != 0.0) return false;
  return true;
}

std::vector<Cplx> half_power_multiplier(const Symbol& sym, const SpaceTimeGrid& grid) {
  return HalfPowerPropagator(sym, grid).multiplier();
}

namespace {

// Everything about one (symbol, process, grid) triple that is shared by all
// paths.
struct Plan {
  SpaceTimeGrid grid;
  int modes = 1;
  /// Exponent int_{t_m}^{t_{m+1}} psi per step; a single entry when the
  /// symbol is time-homogeneous.
  std::vector<std::vector<Cplx>> exponent;
  std::vector<std::vector<Cplx>> factor;
  /// g^hat per interval and mode, Nyquist modes zeroed.
  std::vector<std::vector<std::vector<Cplx>>> g_hat;
  /// Pointwise l2 modulus of g per interval.
  std::vector<std::vector<double>> g_modulus;
  /// Interval of each step, -1 after the last partition time.
  std::vector<int> interval_of;

  const std::vector<Cplx>& step_factor(int m) const { return factor[factor.size() == 1 ? 0 : m]; }
};

Plan make_plan(const Symbol& sym, const AdaptedProcess& g, const SpaceTimeGrid& grid) {
  if (sym.dim() != grid.dim()) throw Error("spde: symbol and grid dimensions differ");
  if (g.modes < 1 || !g.profile) throw Error("spde: process needs modes and a profile");
  if (g.times.size() < 2 || g.times.front() != 0.0) throw Error("spde: partition must start at 0");
  Plan plan{grid, g.modes, {}, {}, {}, {}, {}};
  const int nt = grid.steps();
  const double dt = grid.dt();
  const std::size_t N = grid.points();

  std::vector<int> step_index(g.times.size());
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    const double s = g.times[i] / dt;
    const long r = std::lround(s);
    if (std::abs(s - r) > 1e-9 || r < 0 || r > nt || (i > 0 && r <= step_index[i - 1]))
      throw Error("spde: partition times must be increasing grid times in [0, T]");
    step_index[i] = static_cast<int>(r);
  }
  plan.interval_of.assign(nt, -1);
  for (std::size_t i = 0; i + 1 < g.times.size(); ++i)
    for (int m = step_index[i]; m < step_index[i + 1]; ++m) plan.interval_of[m] = static_cast<int>(i);

  const bool homogeneous = !sym.info().time_dependent && sym.has_closed_form_integral();
  const int windows = homogeneous ? 1 : nt;
  plan.exponent.assign(windows, std::vector<Cplx>(N));
  plan.factor.assign(windows, std::vector<Cplx>(N));
  parallel_for(static_cast<std::size_t>(windows), [&](std::size_t m) {
    const Flow f = sym.flow(m * dt, (m + 1) * dt);
    for (std::size_t q = 0; q < N; ++q) {
      plan.exponent[m][q] = f(grid.frequency(q));
      plan.factor[m][q] = std::exp(plan.exponent[m][q]);
    }
  });

  const std::size_t J = g.times.size() - 1;
  plan.g_hat.assign(J, std::vector<std::vector<Cplx>>(g.modes));
  plan.g_modulus.assign(J, std::vector<double>(N, 0.0));
  for (std::size_t i = 0; i < J; ++i)
    for (int k = 0; k < g.modes; ++k) {
      std::vector<double> values(N);
      for (std::size_t q = 0; q < N; ++q) {
        values[q] = g.profile(static_cast<int>(i), k, grid.coordinate(q));
        if (!std::isfinite(values[q])) throw Error("spde: profile is not finite");
        plan.g_modulus[i][q] += values[q] * values[q];
      }
      auto hat = analyze(grid, std::span<const double>(values));
      for (std::size_t q = 0; q < N; ++q)
        if (grid.is_nyquist(q)) hat[q] = 0.0;
      plan.g_hat[i][k] = std::move(hat);
    }
  for (auto& row : plan.g_modulus)
    for (double& v : row) v = std::sqrt(v);
  return plan;
}

void require_noise(const Plan& plan, const NoiseEnsemble& noise) {
  if (noise.steps() != plan.grid.steps() || std::abs(noise.horizon() - plan.grid.horizon()) > 1e-12 * noise.horizon())
    throw Error("spde: noise and grid time partitions differ");
  if (noise.modes() < plan.modes) throw Error("spde: noise has fewer modes than the process");
}

// Runs the recursion for one path and calls visit(m, w, v) after each step,
// with w = v_m + g^hat dW_m before the flow and v = v_{m+1} after it.
template <class Visit>
void run_path(const Plan& plan, const NoiseEnsemble& noise, std::size_t path, Visit visit) {
  const std::size_t N = plan.grid.points();
  const auto dW = noise.increments(path);
  std::vector<Cplx> v(N, Cplx{0.0, 0.0}), w(N);
  for (int m = 0; m < plan.grid.steps(); ++m) {
    w = v;
    const int i = plan.interval_of[m];
    if (i >= 0)
      for (int k = 0; k < plan.modes; ++k) {
        const double dw = dW[static_cast<std::size_t>(m) * noise.modes() + k];
        const auto& gh = plan.g_hat[i][k];
        for (std::size_t q = 0; q < N; ++q) w[q] += gh[q] * dw;
      }
    const auto& E = plan.step_factor(m);
    for (std::size_t q = 0; q < N; ++q) v[q] = E[q] * w[q];
    visit(m, w, v);
  }
}

ScalarField synthesize_path(const Plan& plan, const NoiseEnsemble& noise, std::size_t path,
                            const std::vector<Cplx>& post) {
  const auto& grid = plan.grid;
  const std::size_t N = grid.points();
  ScalarField out(grid);
  std::vector<Cplx> spec(N);
  run_path(plan, noise, path, [&](int m, const std::vector<Cplx>&, const std::vector<Cplx>& v) {
    for (std::size_t q = 0; q < N; ++q) spec[q] = post.empty() ? v[q] : post[q] * v[q];
    const auto u = synthesize(grid, spec);
    double scale = 0.0, residue = 0.0;
    for (std::size_t q = 0; q < N; ++q) {
      scale = std::max(scale, std::abs(u[q].real()));
      residue = std::max(residue, std::abs(u[q].imag()));
      out.at(m, q) = u[q].real();
    }
    if (residue > 1e-8 * scale && residue > 1e-300)
      throw Error("stochastic_convolution: imaginary residue " + std::to_string(residue) + " exceeds tolerance");
  });
  return out;
}

// E|v_m|^2 per lattice point after each step (exact discrete recursion).
std::vector<std::vector<double>> exact_second_moments(const Plan& plan) {
  const std::size_t N = plan.grid.points();
  const double dt = plan.grid.dt();
  std::vector<std::vector<double>> out(plan.grid.steps(), std::vector<double>(N));
  std::vector<double> a(N, 0.0);
  for (int m = 0; m < plan.grid.steps(); ++m) {
    const int i = plan.interval_of[m];
    const auto& E = plan.step_factor(m);
    for (std::size_t q = 0; q < N; ++q) {
      double inject = 0.0;
      if (i >= 0)
        for (int k = 0; k < plan.modes; ++k) inject += std::norm(plan.g_hat[i][k][q]) * dt;
      a[q] = std::norm(E[q]) * (a[q] + inject);
    }
    out[m] = a;
  }
  return out;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = pairwise_sum(x) / n;
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - mean) * (x[i] - mean);
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

int step_of(const SpaceTimeGrid& grid, double t) {
  const double s = t / grid.dt();
  const long r = std::lround(s);
  if (std::abs(s - r) > 1e-9 || r < 1 || r > grid.steps()) throw Error("spde: t_eval must be a grid time in (0, T]");
  return static_cast<int>(r);
}

}  // namespace

std::vector<std::vector<Cplx>> convolution_spectrum(const Symbol& sym, const AdaptedProcess& g,
                                                    const NoiseEnsemble& noise, const SpaceTimeGrid& grid,
                                                    std::size_t path) {
  const Plan plan = make_plan(sym, g, grid);
  require_noise(plan, noise);
  std::vector<std::vector<Cplx>> out(grid.steps());
  run_path(plan, noise, path, [&](int m, const std::vector<Cplx>&, const std::vector<Cplx>& v) { out[m] = v; });
  return out;
}

ScalarField stochastic_convolution(const Symbol& sym, const AdaptedProcess& g, const NoiseEnsemble& noise,
                                   const SpaceTimeGrid& grid, const std::vector<Cplx>& post_multiplier,
                                   std::size_t path) {
  const Plan plan = make_plan(sym, g, grid);
  require_noise(plan, noise);
  if (!post_multiplier.empty() && post_multiplier.size() != grid.points())
    throw Error("stochastic_convolution: post multiplier has the wrong size");
  return synthesize_path(plan, noise, path, post_multiplier);
}

CheckReport ito_isometry_check(const Symbol& sym, const AdaptedProcess& g, const NoiseEnsemble& noise,
                               const SpaceTimeGrid& grid, double t_eval) {
  const Plan plan = make_plan(sym, g, grid);
  require_noise(plan, noise);
  const int m_eval = step_of(grid, t_eval);
  const std::size_t N = grid.points();
  const double dt = grid.dt();
  const double dual = 1.0 / grid.box_volume();
  const double nu = sym.ellipticity();
  const auto mult = half_power_multiplier(sym, grid);

  // Per step and lattice point: int_{t_j}^{t_{j+1}} exp(2 Re int_{t_j}^s psi) ds
  // with the step's average decay rate.
  std::vector<std::vector<double>> hold(plan.exponent.size(), std::vector<double>(N));
  for (std::size_t w = 0; w < plan.exponent.size(); ++w)
    for (std::size_t q = 0; q < N; ++q) {
      const double lambda = -plan.exponent[w][q].real() / dt;
      hold[w][q] = lambda == 0.0 ? dt : -std::expm1(-2.0 * lambda * dt) / (2.0 * lambda);
    }

  std::vector<double> energy(noise.paths()), lhs(noise.paths());
  parallel_for(noise.paths(), [&](std::size_t path) {
    std::vector<double> dissipation;
    std::vector<Cplx> at_eval;
    std::vector<double> terms(N);
    run_path(plan, noise, path, [&](int m, const std::vector<Cplx>& w, const std::vector<Cplx>& v) {
      if (m >= m_eval) return;
      const auto& h = hold[plan.exponent.size() == 1 ? 0 : m];
      for (std::size_t q = 0; q < N; ++q) terms[q] = std::norm(mult[q]) * std::norm(w[q]) * h[q];
      dissipation.push_back(2.0 * nu * dual * pairwise_sum(terms));
      if (m + 1 == m_eval) at_eval = v;
    });
    const auto u = synthesize(grid, at_eval);
    std::vector<double> sq(N);
    for (std::size_t q = 0; q < N; ++q) sq[q] = std::norm(u[q]);
    energy[path] = pairwise_sum(sq) * grid.cell_volume();
    lhs[path] = energy[path] + pairwise_sum(dissipation);
  });

  const auto second = exact_second_moments(plan);
  const double exact = dual * pairwise_sum(second[m_eval - 1]);
  std::vector<double> g_energy;
  for (int m = 0; m < m_eval; ++m) {
    const int i = plan.interval_of[m];
    if (i < 0) continue;
    std::vector<double> sq(N);
    for (std::size_t q = 0; q < N; ++q) sq[q] = plan.g_modulus[i][q] * plan.g_modulus[i][q];
    g_energy.push_back(pairwise_sum(sq) * grid.cell_volume() * dt);
  }
  const double rhs = pairwise_sum(g_energy);

  const Moments mc = moments(energy);
  const Moments el = moments(lhs);
  CheckReport rep;
  rep.name = "ito_isometry";
  rep.values["symbol"] = sym.id();
  rep.values["process"] = g.id;
  rep.values["paths"] = noise.paths();
  rep.values["modes"] = noise.modes();
  rep.values["n_t"] = grid.steps();
  rep.set("t_eval", grid.time(m_eval));
  rep.set("mc_energy", mc.mean);
  rep.set("mc_standard_error", mc.se);
  rep.set("exact_energy", exact);
  const double gap = std::abs(mc.mean - exact);
  rep.set("deviation_in_se", mc.se > 0.0 ? gap / mc.se : 0.0);
  bool ok = mc.se > 0.0 ? gap <= 4.0 * mc.se : gap <= 1e-12 * std::max(1.0, exact);
  if (rhs > 0.0) {
    const double ratio = el.mean / rhs;
    const double se = el.se / rhs;
    rep.set("energy_lhs", el.mean);
    rep.set("energy_rhs", rhs);
    rep.set("energy_ratio", ratio);
    rep.set("energy_ratio_se", se);
    ok = ok && ratio <= 1.0 + 4.0 * se;
  } else {
    rep.set("energy_lhs", el.mean);
    rep.set("energy_rhs", 0.0);
    rep.note("zero input: both sides vanish");
    ok = ok && el.mean == 0.0;
  }
  rep.passed = ok;
  return rep;
}

std::vector<AdaptedProcess> spde_battery(const SpaceTimeGrid& grid, int modes, std::uint64_t seed, int count) {
  if (modes < 1 || count < 1) throw Error("spde_battery: need positive modes and count");
  const int intervals[4] = {1, 2, 4, 8};
  const double L = grid.half_width();
  const int d = grid.dim();
  std::vector<AdaptedProcess> out;
  for (int b = 0; b < count; ++b) {
    const int J = intervals[b % 4];
    struct Bump {
      double amplitude, width, frequency, phase;
      std::vector<double> center;
    };
    auto bumps = std::make_shared<std::vector<Bump>>();
    std::mt19937_64 rng(derive_seed(seed, b));
    for (int i = 0; i < J * modes; ++i) {
      Bump bp{0.5 + uniform01(rng), L / 4.0 + L / 4.0 * uniform01(rng),
              3.0 * std::numbers::pi / L * uniform01(rng), 2.0 * std::numbers::pi * uniform01(rng),
              std::vector<double>(d)};
      for (double& c : bp.center) c = 0.5 * L * (uniform01(rng) - 0.5);
      bumps->push_back(std::move(bp));
    }
    AdaptedProcess g;
    g.id = "g-" + std::to_string(b + 1);
    g.modes = modes;
    for (int i = 0; i <= J; ++i) g.times.push_back(grid.horizon() * i / J);
    g.profile = [bumps, modes](int interval, int k, Point x) {
      const Bump& bp = (*bumps)[interval * modes + k];
      double r2 = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - bp.center[a]) * (x[a] - bp.center[a]);
      r2 /= bp.width * bp.width;
      if (r2 >= 1.0) return 0.0;
      return bp.amplitude * std::exp(1.0 - 1.0 / (1.0 - r2)) * std::cos(bp.frequency * x[0] + bp.phase);
    };
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

struct RatioEstimate {
  double ratio = 0.0;
  double se = 0.0;
};

// R = (mean(x) / D)^{1/p} with the jackknife standard error.
RatioEstimate jackknife_ratio(std::span<const double> x, double denom, double p) {
  const std::size_t n = x.size();
  const double total = pairwise_sum(x);
  const double R = std::pow(total / n / denom, 1.0 / p);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) loo[i] = std::pow((total - x[i]) / (n - 1) / denom, 1.0 / p);
  const double mean = pairwise_sum(loo) / n;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (loo[i] - mean) * (loo[i] - mean);
  return {R, std::sqrt((n - 1.0) / n * pairwise_sum(dev))};
}

struct MemberRun {
  std::vector<double> x;  // per path E-integrand
  double denom = 0.0;
  double exact2 = 0.0;    // exact E x at p = 2
};

MemberRun run_member(const Symbol& sym, const AdaptedProcess& g, const NoiseEnsemble& noise,
                     const SpaceTimeGrid& grid, double p) {
  const Plan plan = make_plan(sym, g, grid);
  require_noise(plan, noise);
  const std::size_t N = grid.points();
  const double dt = grid.dt();
  const auto post = half_power_multiplier(sym, grid);
  MemberRun run;
  run.x.resize(noise.paths());
  parallel_for(noise.paths(), [&](std::size_t path) {
    const ScalarField u = synthesize_path(plan, noise, path, post);
    run.x[path] = std::pow(lp_norm(u, p), p);
  });
  std::vector<double> per_step(grid.steps(), 0.0);
  for (int m = 0; m < grid.steps(); ++m) {
    const int i = plan.interval_of[m];
    if (i < 0) continue;
    std::vector<double> a(N);
    for (std::size_t q = 0; q < N; ++q) a[q] = std::pow(plan.g_modulus[i][q], p);
    per_step[m] = pairwise_sum(a) * grid.cell_volume() * dt;
  }
  run.denom = pairwise_sum(per_step);
  const auto second = exact_second_moments(plan);
  std::vector<double> e(grid.steps());
  for (int m = 0; m < grid.steps(); ++m) {
    std::vector<double> a(N);
    for (std::size_t q = 0; q < N; ++q) a[q] = std::norm(post[q]) * second[m][q];
    e[m] = pairwise_sum(a) / grid.box_volume() * dt;
  }
  run.exact2 = pairwise_sum(e);
  return run;
}

}  // namespace

CheckReport lp_ratio_estimate(const Symbol& sym, const std::vector<AdaptedProcess>& battery,
                              const NoiseEnsemble& noise, const SpaceTimeGrid& grid, double p,
                              const RatioOptions& options) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw Error("lp_ratio_estimate: p must be >= 2");
  if (!options.allow_any_p && p != 2.0 && p != 4.0 && p != 6.0)
    throw Error("lp_ratio_estimate: p must be 2, 4 or 6 unless arbitrary p is enabled");
  if (battery.empty()) throw Error("lp_ratio_estimate: empty battery");

  CheckReport rep;
  rep.name = "lp_ratio";
  rep.values["symbol"] = sym.id();
  rep.set("p", p);
  rep.values["paths"] = noise.paths();
  rep.values["paths_doubled"] = 2 * noise.paths();
  rep.values["modes"] = noise.modes();
  rep.values["grid"] = {{"L", grid.half_width()}, {"n", grid.n()}, {"d", grid.dim()}, {"T", grid.horizon()},
                        {"n_t", grid.steps()}};
  rep.note("the constant N(d,p,gamma,nu) is not reproducible; only finiteness and stability are certified");

  const NoiseEnsemble doubled = noise.with_paths(2 * noise.paths());
  const std::size_t M = noise.paths();
  bool ok = true;
  double best = 0.0, best_refined = 0.0;
  Json members = Json::array();
  for (const auto& g : battery) {
    Json row;
    row["id"] = g.id;
    if (g.is_zero(grid)) {
      row["status"] = "excluded: zero input";
      rep.note("excluded: zero input (" + g.id + ")");
      members.push_back(row);
      continue;
    }
    const MemberRun run = run_member(sym, g, doubled, grid, p);
    const auto half = jackknife_ratio(std::span<const double>(run.x.data(), M), run.denom, p);
    const auto full = jackknife_ratio(run.x, run.denom, p);
    const double drift = std::abs(full.ratio - half.ratio);
    const bool finite = std::isfinite(full.ratio) && std::isfinite(full.se);
    const bool stable = drift < 2.0 * half.se;
    const bool precise = full.se < 0.1 * full.ratio;
    row["status"] = "estimated";
    row["ratio"] = full.ratio;
    row["se"] = full.se;
    row["ratio_half_paths"] = half.ratio;
    row["se_half_paths"] = half.se;
    row["doubling_drift"] = drift;
    row["f_norm_p"] = run.denom;
    bool member_ok = finite && stable && precise;
    if (p == 2.0) {
      const Moments mc = moments(run.x);
      const bool match = std::abs(mc.mean - run.exact2) <= 4.0 * mc.se;
      row["exact_ratio_squared"] = run.exact2 / run.denom;
      row["mc_ratio_squared"] = mc.mean / run.denom;
      row["exact_match"] = match;
      member_ok = member_ok && match;
    }
    if (options.refine) {
      const SpaceTimeGrid fine = grid.refined();
      const NoiseEnsemble fine_noise(noise.seed(), M, noise.modes(), fine.steps(), fine.horizon());
      const MemberRun rf = run_member(sym, g, fine_noise, fine, p);
      const auto est = jackknife_ratio(rf.x, rf.denom, p);
      row["ratio_refined"] = est.ratio;
      row["se_refined"] = est.se;
      best_refined = std::max(best_refined, est.ratio);
    }
    row["passed"] = member_ok;
    ok = ok && member_ok;
    best = std::max(best, full.ratio);
    members.push_back(row);
  }
  rep.values["members"] = members;
  if (best > 0.0) {
    rep.set("max_ratio", best);
    if (options.refine) {
      const double drift = std::abs(best_refined - best) / best;
      rep.set("max_ratio_refined", best_refined);
      rep.set("refinement_drift", drift);
      ok = ok && drift < 0.1;
    }
  } else {
    rep.values["max_ratio"] = nullptr;
  }
  rep.passed = ok;
  return rep;
}

void write_path_dump(const std::string& file, const std::vector<ScalarField>& paths) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot open '" + file + "' for writing");
  auto put = [&](std::uint64_t v) {
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xff);
    os.write(bytes, 8);
  };
  const SpaceTimeGrid* grid = paths.empty() ? nullptr : &paths.front().grid;
  put(paths.size());
  put(grid ? grid->steps() : 0);
  put(grid ? grid->points() : 0);
  put(grid ? grid->dim() : 0);
  for (const auto& f : paths)
    for (double v : f.values) put(std::bit_cast<std::uint64_t>(v));
  if (!os) throw Error("failed writing '" + file + "'");
}

}  // namespace spdelab

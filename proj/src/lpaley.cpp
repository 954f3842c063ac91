#include "spdelab/lpaley.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "spdelab/kernels.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/random.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

ScalarField::ScalarField(const SpaceTimeGrid& g) : grid(g), values(g.points() * g.steps(), 0.0) {}

VectorField::VectorField(const SpaceTimeGrid& g, int modes) : grid(g) {
  if (modes < 1) throw Error("VectorField: need at least one mode");
  components.assign(modes, ScalarField(g));
}

ScalarField VectorField::modulus() const {
  ScalarField out(grid);
  for (std::size_t q = 0; q < out.values.size(); ++q) {
    double s = 0.0;
    for (const auto& c : components) s += c.values[q] * c.values[q];
    out.values[q] = std::sqrt(s);
  }
  return out;
}

VectorField sample_field(const SpaceTimeGrid& grid, int modes,
                         const std::function<double(int k, double t, Point x)>& f) {
  VectorField out(grid, modes);
  for (int k = 0; k < modes; ++k)
    for (int i = 0; i < grid.steps(); ++i) {
      const double t = (i + 0.5) * grid.dt();
      for (std::size_t q = 0; q < grid.points(); ++q) out.components[k].at(i, q) = f(k, t, grid.coordinate(q));
    }
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Time cell (i dt, (i+1) dt] holding r.
int slice_of(const SpaceTimeGrid& grid, double r) {
  const int i = static_cast<int>(std::ceil(r / grid.dt())) - 1;
  return std::clamp(i, 0, grid.steps() - 1);
}

// Fourier coefficients of every slice of every component: [mode][slice].
std::vector<std::vector<std::vector<Cplx>>> spectra_of(const VectorField& f) {
  const auto& grid = f.grid;
  std::vector<std::vector<std::vector<Cplx>>> out(f.modes(), std::vector<std::vector<Cplx>>(grid.steps()));
  for (int k = 0; k < f.modes(); ++k)
    for (int i = 0; i < grid.steps(); ++i) out[k][i] = analyze(grid, f.components[k].slice(i));
  return out;
}

void require_compatible(const Symbol& sym, const VectorField& f) {
  if (sym.dim() != f.grid.dim()) throw Error("lpaley: symbol and field dimensions differ");
  for (const auto& c : f.components)
    for (double v : c.values)
      if (!std::isfinite(v)) throw Error("lpaley: field has non-finite values");
}

// W_i(xi) = |m|^2 sum_{j >= i} int_{cell i} exp(-2 (t_j - r) lambda) dr per
// slice i and lattice point.
std::vector<std::vector<double>> quadratic_weights(const Symbol& sym, const SpaceTimeGrid& grid) {
  const HalfPowerPropagator prop(sym, grid);
  if (!prop.time_homogeneous())
    throw Error("lpaley: exact quadratic form needs a time-independent symbol with closed-form flow");
  const std::size_t N = grid.points();
  const int nt = grid.steps();
  const double dt = grid.dt();
  std::vector<std::vector<double>> w(nt, std::vector<double>(N, 0.0));
  for (std::size_t q = 0; q < N; ++q) {
    const double m2 = std::norm(prop.multiplier()[q]);
    if (m2 == 0.0) continue;
    const double lambda = -prop.unit_flow()[q].real();
    const double cell = (lambda == 0.0) ? dt : -std::expm1(-2.0 * lambda * dt) / (2.0 * lambda);
    const double decay = std::exp(-2.0 * lambda * dt);
    // Backward recursion: S_i = 1 + decay * S_{i+1}.
    double tail = 0.0;
    for (int i = nt - 1; i >= 0; --i) {
      tail = 1.0 + decay * tail;
      w[i][q] = m2 * cell * tail;
    }
  }
  return w;
}

// Row-major axis indices of a flat index.
std::vector<int> axis_indices(const SpaceTimeGrid& grid, std::size_t flat) {
  std::vector<int> idx(grid.dim());
  for (int a = grid.dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % grid.n());
    flat /= grid.n();
  }
  return idx;
}

// Flat index of signed lattice indices m (|m_a| < n/2), FFT order.
std::size_t lattice_flat(const SpaceTimeGrid& grid, const std::vector<int>& m) {
  std::size_t flat = 0;
  for (int a = 0; a < grid.dim(); ++a) {
    const int j = (m[a] + grid.n()) % grid.n();
    flat = flat * grid.n() + j;
  }
  return flat;
}

}  // namespace

std::vector<std::vector<Cplx>> kernel_convolve(const Symbol& sym, const VectorField& f, double r, double t) {
  require_compatible(sym, f);
  const auto& grid = f.grid;
  std::vector<std::vector<Cplx>> out(f.modes(), std::vector<Cplx>(grid.points(), Cplx{0.0, 0.0}));
  if (r >= t) return out;
  const HalfPowerPropagator prop(sym, grid);
  const auto P = prop(r, t);
  const int i = slice_of(grid, r);
  for (int k = 0; k < f.modes(); ++k) {
    auto spec = analyze(grid, f.components[k].slice(i));
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= P[q];
    out[k] = synthesize(grid, std::move(spec));
  }
  return out;
}

GResult g_operator(const Symbol& sym, const VectorField& f, const GOptions& options) {
  require_compatible(sym, f);
  const auto& grid = f.grid;
  const std::size_t N = grid.points();
  const int nt = grid.steps();
  const double dt = grid.dt();
  const HalfPowerPropagator prop(sym, grid);
  const auto spectra = spectra_of(f);
  const double inner_gap = dt * std::ldexp(1.0, -(options.cluster.levels - 1));

  GResult result{ScalarField(grid), true, 0.0};
  std::vector<double> share(nt, 0.0);
  parallel_for(static_cast<std::size_t>(nt), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double t = grid.time(j + 1);
    std::vector<double> acc(N, 0.0), tail(N, 0.0);
    std::vector<Cplx> spec(N);
    for (int i = 0; i <= j; ++i) {
      const double lo = i * dt;
      const double hi = (i == j) ? t : (i + 1) * dt;
      for (const auto& node : clustered(lo, hi, t, options.cluster)) {
        const auto P = prop(node.x, t);
        const bool innermost = (t - node.x) <= inner_gap;
        for (int k = 0; k < f.modes(); ++k) {
          for (std::size_t q = 0; q < N; ++q) spec[q] = P[q] * spectra[k][i][q];
          const auto v = synthesize(grid, spec);
          for (std::size_t q = 0; q < N; ++q) {
            const double c = node.w * std::norm(v[q]);
            acc[q] += c;
            if (innermost) tail[q] += c;
          }
        }
      }
    }
    for (std::size_t q = 0; q < N; ++q) result.field.at(j, q) = std::sqrt(acc[q]);
    const double total = pairwise_sum(acc);
    share[j] = total > 0.0 ? pairwise_sum(tail) / total : 0.0;
  });
  result.worst_tail = *std::max_element(share.begin(), share.end());
  result.converged = result.worst_tail < options.eps_tol;
  return result;
}

double plancherel_ratio_squared(const Symbol& sym, const VectorField& f) {
  require_compatible(sym, f);
  const auto& grid = f.grid;
  const auto w = quadratic_weights(sym, grid);
  const auto spectra = spectra_of(f);
  std::vector<double> num, den;
  for (int k = 0; k < f.modes(); ++k)
    for (int i = 0; i < grid.steps(); ++i)
      for (std::size_t q = 0; q < grid.points(); ++q) {
        const double a = std::norm(spectra[k][i][q]);
        num.push_back(w[i][q] * a);
        den.push_back(a);
      }
  const double d = pairwise_sum(den);
  if (d == 0.0) throw Error("plancherel_ratio_squared: zero field");
  return pairwise_sum(num) / d;
}

VectorField power_step(const Symbol& sym, const VectorField& f) {
  require_compatible(sym, f);
  const auto& grid = f.grid;
  const auto w = quadratic_weights(sym, grid);
  const auto spectra = spectra_of(f);
  VectorField out(grid, f.modes());
  for (int k = 0; k < f.modes(); ++k)
    for (int i = 0; i < grid.steps(); ++i) {
      auto spec = spectra[k][i];
      for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= w[i][q];
      const auto v = synthesize(grid, std::move(spec));
      for (std::size_t q = 0; q < v.size(); ++q) out.components[k].at(i, q) = v[q].real();
    }
  const double norm = lp_norm(out, 2.0);
  if (norm == 0.0) throw Error("power_step: field is annihilated by the quadratic form");
  for (auto& c : out.components)
    for (double& v : c.values) v /= norm;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Stencil {
  std::vector<int> dt_steps;
  std::vector<std::vector<int>> dx_steps;
};

Stencil ball_stencil(const SpaceTimeGrid& grid, const QuasiMetric& rho, double c) {
  const int d = grid.dim();
  const int n = grid.n();
  Stencil st;
  const int half = n / 2;
  std::vector<int> m(d, -half + 1);
  for (int di = -(grid.steps() - 1); di <= grid.steps() - 1; ++di) {
    const double budget = c - rho.time_part(std::abs(di) * grid.dt());
    if (budget <= 0.0) continue;
    const int reach = std::min(half, static_cast<int>(std::ceil(budget / grid.dx())));
    std::fill(m.begin(), m.end(), -reach);
    for (;;) {
      double r2 = 0.0;
      bool valid = true;
      for (int a = 0; a < d; ++a) {
        if (m[a] <= -half) valid = false;
        r2 += (m[a] * grid.dx()) * (m[a] * grid.dx());
      }
      if (valid && std::sqrt(r2) < budget) {
        st.dt_steps.push_back(di);
        st.dx_steps.push_back(m);
      }
      int a = d - 1;
      while (a >= 0 && m[a] == reach) m[a--] = -reach;
      if (a < 0) break;
      ++m[a];
    }
  }
  return st;
}

std::vector<double> ball_radii(const SpaceTimeGrid& grid, const QuasiMetric& rho, const BallFamily& family) {
  const double c_min = family.c_min > 0.0 ? family.c_min : std::min(grid.dx(), rho.time_part(grid.dt()));
  const double diameter = rho.time_part(grid.horizon()) + grid.half_width() * std::sqrt(grid.dim());
  std::vector<double> radii;
  for (double c = c_min;; c *= 2.0) {
    radii.push_back(c);
    if (c > diameter) break;
  }
  return radii;
}

// Elementwise max over radius levels of sup over family balls containing each
// point of stat(ball values).
ScalarField ball_sup(const ScalarField& f, const QuasiMetric& rho, const BallFamily& family,
                     double (*stat)(const std::vector<double>&)) {
  if (family.stride < 1) throw Error("ball family: stride must be >= 1");
  for (double v : f.values)
    if (!std::isfinite(v)) throw Error("ball family: field has non-finite values");
  const auto& grid = f.grid;
  const auto radii = ball_radii(grid, rho, family);
  const std::size_t N = grid.points();
  const int nt = grid.steps();
  std::vector<std::vector<double>> level(radii.size());
  parallel_for(radii.size(), [&](std::size_t lv) {
    std::vector<double> best(f.values.size(), 0.0);
    const Stencil st = ball_stencil(grid, rho, radii[lv]);
    const int stride = std::min<long>(family.stride, 1L << std::min<std::size_t>(lv, 30));
    std::vector<std::size_t> members;
    std::vector<double> vals;
    for (int ci = 0; ci < nt; ci += stride)
      for (std::size_t cq = 0; cq < N; ++cq) {
        const auto idx = axis_indices(grid, cq);
        if (std::any_of(idx.begin(), idx.end(), [&](int j) { return j % stride != 0; })) continue;
        members.clear();
        vals.clear();
        for (std::size_t s = 0; s < st.dt_steps.size(); ++s) {
          const int ti = ci + st.dt_steps[s];
          if (ti < 0 || ti >= nt) continue;
          const std::size_t pos = static_cast<std::size_t>(ti) * N + grid.shifted(cq, st.dx_steps[s]);
          members.push_back(pos);
          vals.push_back(f.values[pos]);
        }
        const double a = stat(vals);
        for (std::size_t pos : members) best[pos] = std::max(best[pos], a);
      }
    level[lv] = std::move(best);
  });
  ScalarField out(grid);
  for (const auto& l : level)
    for (std::size_t q = 0; q < l.size(); ++q) out.values[q] = std::max(out.values[q], l[q]);
  return out;
}

double mean_abs(const std::vector<double>& v) {
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
  return pairwise_sum(a) / static_cast<double>(v.size());
}

double mean_oscillation(const std::vector<double>& v) {
  const double mean = pairwise_sum(v) / static_cast<double>(v.size());
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i] - mean);
  return pairwise_sum(a) / static_cast<double>(v.size());
}

}  // namespace

ScalarField maximal_function(const ScalarField& f, const QuasiMetric& rho, const BallFamily& family) {
  return ball_sup(f, rho, family, mean_abs);
}

ScalarField sharp_function(const ScalarField& f, const QuasiMetric& rho, const BallFamily& family) {
  return ball_sup(f, rho, family, mean_oscillation);
}

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error("lp_norm: p must be a finite value >= 1");
  std::vector<double> a(f.values.size());
  for (std::size_t q = 0; q < a.size(); ++q) a[q] = std::pow(std::abs(f.values[q]), p);
  const double integral = pairwise_sum(a) * f.grid.cell_volume() * f.grid.dt();
  return std::pow(integral, 1.0 / p);
}

double lp_norm(const VectorField& f, double p) { return lp_norm(f.modulus(), p); }

// ---------------------------------------------------------------------------

namespace {

constexpr int kTrigDegree = 8;

// Real trigonometric polynomial with seeded coefficients on lattice indices
// |m_a| <= 8, modulated in time by 1 + cos/2.
VectorField trig_field(const SpaceTimeGrid& grid, int modes, std::uint64_t seed) {
  const int d = grid.dim();
  const int deg = std::min(kTrigDegree, grid.n() / 2 - 1);
  VectorField out(grid, modes);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < modes; ++k) {
    std::vector<Cplx> coeffs(grid.points(), Cplx{0.0, 0.0});
    const double scale = grid.box_volume();
    // Canonical lattice walk so that every grid draws the same coefficients.
    std::vector<int> m(d, -kTrigDegree);
    for (;;) {
      int first = 0;
      for (int a = 0; a < d && first == 0; ++a) first = m[a];
      const double re = 2.0 * uniform01(rng) - 1.0;
      const double im = 2.0 * uniform01(rng) - 1.0;
      bool inside = first > 0;
      for (int a = 0; a < d; ++a) inside = inside && std::abs(m[a]) <= deg;
      if (inside) {
        const Cplx c{re, im};
        coeffs[lattice_flat(grid, m)] += scale * c;
        std::vector<int> neg(m);
        for (int& v : neg) v = -v;
        coeffs[lattice_flat(grid, neg)] += scale * std::conj(c);
      }
      int a = d - 1;
      while (a >= 0 && m[a] == kTrigDegree) m[a--] = -kTrigDegree;
      if (a < 0) break;
      ++m[a];
    }
    const auto spatial = synthesize(grid, std::move(coeffs));
    const double freq = 1.0 + std::floor(3.0 * uniform01(rng));
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    for (int i = 0; i < grid.steps(); ++i) {
      const double t = (i + 0.5) * grid.dt();
      const double mod = 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * freq * t / grid.horizon() + phase);
      for (std::size_t q = 0; q < grid.points(); ++q) out.components[k].at(i, q) = mod * spatial[q].real();
    }
  }
  return out;
}

VectorField mode_field(const SpaceTimeGrid& grid, int modes, int m) {
  if (m >= grid.n() / 2) throw Error("battery: mode index beyond the grid's Nyquist index");
  const double xi = std::numbers::pi / grid.half_width() * m;
  return sample_field(grid, modes, [&](int k, double, Point x) {
    return std::cos(xi * x[0] + 0.5 * std::numbers::pi * k);
  });
}

VectorField indicator_field(const SpaceTimeGrid& grid, int modes, double w) {
  const double L = grid.half_width();
  const double sigma = w * L / 8.0;
  const double T = grid.horizon();
  return sample_field(grid, modes, [&](int k, double t, Point x) {
    if (t < 0.25 * T || t > 0.75 * T) return 0.0;
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      double z = x[a] - (a == 0 ? 0.25 * L * k : 0.0);
      z -= 2.0 * L * std::round(z / (2.0 * L));
      r2 += z * z;
    }
    return std::exp(-0.5 * r2 / (sigma * sigma)) / (k + 1);
  });
}

}  // namespace

std::vector<TestField> lpaley_battery(const Symbol& sym, int modes, std::uint64_t seed) {
  if (modes < 1) throw Error("battery: need at least one mode");
  const bool exact = !sym.info().time_dependent && sym.has_closed_form_integral();
  const int mode_index[5] = {1, 2, 5, 9, 14};
  const double widths[5] = {0.5, 0.75, 1.0, 1.5, 2.0};
  std::vector<TestField> out;
  for (int r = 0; r < 5; ++r) {
    const int m = mode_index[r];
    out.push_back({"mode-" + std::to_string(m), [=](const SpaceTimeGrid& g) { return mode_field(g, modes, m); }});
    const std::uint64_t trig_seed = derive_seed(seed, 2 * r);
    out.push_back({"trig-" + std::to_string(r + 1),
                   [=](const SpaceTimeGrid& g) { return trig_field(g, modes, trig_seed); }});
    const double w = widths[r];
    out.push_back({"indicator-" + fmt(w), [=](const SpaceTimeGrid& g) { return indicator_field(g, modes, w); }});
    const std::uint64_t extra_seed = derive_seed(seed, 2 * r + 1);
    if (exact) {
      out.push_back({"power-" + std::to_string(r + 1), [=](const SpaceTimeGrid& g) {
                       return power_step(sym, trig_field(g, modes, extra_seed));
                     }});
    } else {
      out.push_back({"trig-" + std::to_string(r + 6),
                     [=](const SpaceTimeGrid& g) { return trig_field(g, modes, extra_seed); }});
    }
  }
  return out;
}

CheckReport verify_lpaley(const Symbol& sym, const std::vector<TestField>& battery, const std::vector<double>& p_list,
                          const SpaceTimeGrid& grid, const GOptions& options) {
  if (battery.empty()) throw Error("verify_lpaley: empty battery");
  if (p_list.empty()) throw Error("verify_lpaley: empty p list");
  for (double p : p_list)
    if (!(p >= 1.0)) throw Error("verify_lpaley: p must be >= 1");
  const bool exact = !sym.info().time_dependent && sym.has_closed_form_integral();

  struct Row {
    double f_norm = 0.0;
    double g_norm = 0.0;
  };
  struct FieldResult {
    std::vector<Row> rows;  // per p
    bool zero = false;
    bool converged = true;
    double worst_tail = 0.0;
    double plancherel = std::nan("");
    double quadrature2 = std::nan("");
  };
  const SpaceTimeGrid grids[2] = {grid, grid.refined()};
  const std::size_t F = battery.size();
  std::vector<FieldResult> results(2 * F);
  parallel_for(2 * F, [&](std::size_t job) {
    const SpaceTimeGrid& g = grids[job / F];
    const TestField& tf = battery[job % F];
    FieldResult& res = results[job];
    const VectorField f = tf.make(g);
    if (lp_norm(f, 2.0) == 0.0) {
      res.zero = true;
      return;
    }
    const GResult G = g_operator(sym, f, options);
    res.converged = G.converged;
    res.worst_tail = G.worst_tail;
    for (double p : p_list) res.rows.push_back({lp_norm(f, p), lp_norm(G.field, p)});
    if (exact) {
      res.plancherel = plancherel_ratio_squared(sym, f);
      const double r = lp_norm(G.field, 2.0) / lp_norm(f, 2.0);
      res.quadrature2 = r * r;
    }
  });

  CheckReport rep;
  rep.name = "lpaley";
  rep.values["symbol"] = sym.id();
  rep.values["grid"] = {{"L", grid.half_width()}, {"n", grid.n()}, {"d", grid.dim()}, {"T", grid.horizon()},
                        {"n_t", grid.steps()}};
  rep.values["fields"] = F;
  bool ok = true;
  bool converged = true;
  double worst_tail = 0.0;
  Json per_p = Json::array();
  Json rows = Json::array();
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    double best[2] = {0.0, 0.0};
    double half_best = 0.0;
    std::string arg;
    for (int gi = 0; gi < 2; ++gi)
      for (std::size_t fi = 0; fi < F; ++fi) {
        const FieldResult& res = results[gi * F + fi];
        if (res.zero) continue;
        const Row& row = res.rows[pi];
        const double ratio = row.g_norm / row.f_norm;
        if (!std::isfinite(ratio)) ok = false;
        if (ratio > best[gi]) {
          best[gi] = ratio;
          if (gi == 0) arg = battery[fi].id;
        }
        if (gi == 0 && fi < F / 2) half_best = std::max(half_best, ratio);
        rows.push_back({{"p", p_list[pi]}, {"field_id", battery[fi].id}, {"refined", gi == 1},
                        {"f_norm", row.f_norm}, {"g_norm", row.g_norm}, {"ratio", ratio}});
      }
    const double drift = best[0] > 0.0 ? std::abs(best[1] - best[0]) / best[0] : INFINITY;
    const double extension = best[0] > 0.0 ? (best[0] - half_best) / best[0] : INFINITY;
    if (!(drift < 0.1) || !(extension < 0.1)) ok = false;
    per_p.push_back({{"p", p_list[pi]}, {"max_ratio", best[0]}, {"max_ratio_refined", best[1]},
                     {"argmax", arg}, {"refinement_drift", drift}, {"half_battery_max", half_best},
                     {"extension_drift", extension}});
  }
  for (std::size_t j = 0; j < results.size(); ++j) {
    const FieldResult& res = results[j];
    if (res.zero) {
      if (j < F) rep.note("excluded: zero field " + battery[j].id);
      continue;
    }
    converged = converged && res.converged;
    worst_tail = std::max(worst_tail, res.worst_tail);
  }
  if (!converged) {
    ok = false;
    rep.note("G quadrature did not converge");
  }
  rep.values["per_p"] = per_p;
  rep.values["G_converged"] = converged;
  rep.values["G_worst_tail"] = worst_tail;
  if (exact && std::find(p_list.begin(), p_list.end(), 2.0) != p_list.end()) {
    double mismatch = 0.0;
    double max_exact = 0.0;
    for (const auto& res : results) {
      if (res.zero) continue;
      mismatch = std::max(mismatch, std::abs(res.quadrature2 - res.plancherel) / res.plancherel);
      max_exact = std::max(max_exact, res.plancherel);
    }
    rep.set("plancherel_max_ratio_squared", max_exact);
    rep.set("plancherel_mismatch", mismatch);
    if (!(mismatch <= 1e-6)) ok = false;
  } else if (!exact) {
    rep.note("exact quadratic form unavailable for this symbol");
  }
  rep.values["rows"] = rows;
  rep.passed = ok;
  return rep;
}

}  // namespace spdelab

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spdelab/bernstein.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/lpaley.hpp"
#include "spdelab/metric.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/spde.hpp"
#include "spdelab/symbols.hpp"

using namespace spdelab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs_diff(const KernelField& kf, const std::function<double(double)>& ref) {
  double e = 0.0;
  for (std::size_t i = 0; i < kf.values.size(); ++i)
    e = std::max(e, std::abs(kf.values[i].real() - ref(kf.grid.coordinate(i)[0])));
  return e;
}

// 1. Closed-form kernels.
void kernels_exact(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const double heat = max_abs_diff(kernel_field(symbol_from_id("heat", 1), 0.0, 0.25, grid),
                                   [](double x) { return oracle::periodic_gaussian(x, 0.25, 16.0); });
  const double cauchy = max_abs_diff(kernel_field(symbol_from_id("frac:1", 1), 0.0, 0.25, grid),
                                     [](double x) { return oracle::periodic_cauchy(x, 0.25, 16.0); });
  const double elapsed = seconds_since(start);
  v.detail << "heat max-norm " << heat << ", cauchy max-norm " << cauchy << ", " << elapsed << " s";
  v.require(heat <= 1e-9, "heat <= 1e-9");
  v.require(cauchy <= 1e-7, "cauchy <= 1e-7");
  v.require(elapsed < 5.0, "runtime < 5 s");
}

// 2. Scaling relations.
void scaling_relations(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const SpaceTimeGrid grid(16.0, 1024, 1);
  double worst = 0.0;
  for (const char* id : {"heat", "frac:1", "frac:1.5", "order4"}) {
    const auto rep = check_scaling_relations(symbol_from_id(id, 1), 0.0, 0.5, grid, 50);
    worst = std::max({worst, rep.value("residual_q1_relation"), rep.value("residual_q2_relation")});
  }
  const double elapsed = seconds_since(start);
  v.detail << "worst relative residual " << worst << ", " << elapsed << " s";
  v.require(worst <= 1e-7, "residual <= 1e-7");
  v.require(elapsed < 30.0, "runtime < 30 s");
}

// 3. Ellipticity and dyadic certificates.
void symbol_certificates(Verdict& v) {
  const std::vector<double> ts{0.0, 0.5, 1.0};
  const auto xi = frequency_sample_grid(1, 1e-3, 1e3, 13, 9);
  double worst = 0.0;
  for (const char* id : {"heat", "frac:0.5", "frac:1", "frac:1.5"})
    worst = std::max(worst, std::abs(check_ellipticity(symbol_from_id(id, 1), ts, xi).value("inf_ratio") - 1.0));
  const auto Rs = log_grid(1e-2, 1e2, 9);
  const auto dyadic = check_dyadic_condition(symbol_from_id("heat", 1), Rs, {DyadicCombo{{{1}, 1}}}, ts);
  const double lo = dyadic.value("combo0_min_ratio"), hi = dyadic.value("combo0_max_ratio");
  const double dev = std::max(std::abs(lo - 6.0), std::abs(hi - 6.0)) / 6.0;
  v.detail << "ellipticity |inf_ratio - 1| " << worst << ", dyadic ratio in [" << lo << ", " << hi << "] over R in [1e-2, 1e2]";
  v.require(worst <= 1e-12, "ellipticity within 1e-12");
  v.require(dev <= 1e-6, "dyadic ratio 6 within 1e-6");
}

// 4. Ito isometry and energy inequality.
void ito_isometry(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const SpaceTimeGrid grid(M_PI, 64, 1, 1.0, 256);
  const NoiseEnsemble noise(7, 4096, 4, 256, 1.0);
  const auto sym = symbol_from_id("heat", 1);
  double worst_dev = 0.0, worst_energy = 0.0;
  for (const auto& g : spde_battery(grid, 4, 7, 5)) {
    const auto rep = ito_isometry_check(sym, g, noise, grid, 1.0);
    worst_dev = std::max(worst_dev, rep.value("deviation_in_se"));
    const double excess = (rep.value("energy_ratio") - 1.0) / rep.value("energy_ratio_se");
    worst_energy = std::max(worst_energy, excess);
    v.require(rep.value("deviation_in_se") <= 4.0, g.id + " isometry within 4 SE");
    v.require(rep.value("energy_ratio") <= 1.0 + 4.0 * rep.value("energy_ratio_se"), g.id + " energy <= 1 + 4 SE");
  }
  const double elapsed = seconds_since(start);
  v.detail << "max |MC - exact| " << worst_dev << " SE, max (LHS/RHS - 1)/SE " << worst_energy << ", " << elapsed
           << " s";
  v.require(elapsed < 120.0, "runtime < 2 min");
}

// 5. Hormander certificate.
void hormander(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const SpaceTimeGrid grid(16.0, 4096, 1);
  PairSampler sampler;
  sampler.scales = 8;
  sampler.pairs_per_scale = 32;
  sampler.seed = 1;
  struct Case {
    const char* id;
    QuasiMetric rho;
  };
  const auto phi = bernstein_catalog(1, {0.25, 0.75});
  const std::vector<Case> cases = {{"heat", parabolic_metric(2.0)},
                                   {"frac:1", parabolic_metric(1.0)},
                                   {"subord:1:0.25:0.75", subordinate_metric(phi)}};
  for (const auto& c : cases) {
    const auto rep = hormander_sup_estimate(symbol_from_id(c.id, 1), c.rho, sampler, 2.0, grid);
    v.detail << c.id << ": sup " << rep.value("sup") << " drift " << rep.value("refinement_drift") << " slope "
             << rep.value("scale_slope") << "; ";
    v.require(std::isfinite(rep.value("sup")), std::string(c.id) + " finite");
    v.require(rep.value("refinement_drift") < 0.1, std::string(c.id) + " drift < 10%");
    v.require(rep.value("scale_slope") <= 0.1, std::string(c.id) + " slope <= 0.1");
  }
  const double elapsed = seconds_since(start);
  v.detail << elapsed << " s";
  v.require(elapsed < 600.0, "runtime < 10 min");
}

// 6. Kernel lemma exponents.
void lemma_exponents(Verdict& v) {
  const SpaceTimeGrid grid(16.0, 2048, 1);
  for (const char* id : {"heat", "frac:1"}) {
    const auto sym = symbol_from_id(id, 1);
    const double expected_mc1 = -2.0 * lemma_delta(sym.order());
    const std::vector<std::pair<const char*, double>> lemmas = {{"mc1", expected_mc1}, {"mc2", 2.0}, {"mc3", 2.0}};
    for (const auto& [lemma, expected] : lemmas) {
      const double slope = verify_kernel_lemma(sym, grid, lemma, default_lemma_sweep(lemma, grid)).value("slope");
      v.detail << id << " " << lemma << " slope " << slope << " (printed " << expected << "); ";
      v.require(std::abs(slope - expected) <= 0.1, std::string(id) + " " + lemma + " within 0.1");
    }
  }
}

// 7. Littlewood-Paley.
void littlewood_paley(Verdict& v) {
  const SpaceTimeGrid grid(M_PI, 64, 1, 1.0, 8);
  for (const char* id : {"heat", "frac:1"}) {
    const auto sym = symbol_from_id(id, 1);
    const auto rep = verify_lpaley(sym, lpaley_battery(sym), {2.0, 4.0}, grid);
    for (const auto& row : rep.values["per_p"]) {
      const double ratio = row["max_ratio"].get<double>(), drift = row["refinement_drift"].get<double>();
      const double p = row["p"].get<double>();
      v.detail << id << " p=" << p << ": max " << ratio << " drift " << drift << "; ";
      v.require(std::isfinite(ratio) && ratio > 0.0, std::string(id) + " finite ratio");
      v.require(drift < 0.1, std::string(id) + " drift < 10%");
    }
    const double mismatch = rep.value("plancherel_mismatch");
    v.detail << id << " Plancherel mismatch " << mismatch << "; ";
    v.require(mismatch <= 1e-6, std::string(id) + " Plancherel match 1e-6");
    v.require(rep.values["fields"].get<int>() == 20, "20-field battery");
  }
}

// 8. Maximal regularity ratios.
void maximal_regularity(Verdict& v) {
  const SpaceTimeGrid grid(8.0, 64, 1, 1.0, 64);
  const NoiseEnsemble noise(1, 1024, 4, 64, 1.0);
  const auto battery = spde_battery(grid, 4, 1, 10);
  RatioOptions options;
  options.refine = false;
  for (const char* id : {"heat", "frac:1", "order4", "subord:1:0.25:0.75"}) {
    const auto rep = lp_ratio_estimate(symbol_from_id(id, 1), battery, noise, grid, 4.0, options);
    double worst_se = 0.0, worst_drift = 0.0;
    for (const auto& m : rep.values["members"]) {
      if (m["status"] != "estimated") continue;
      const double ratio = m["ratio"].get<double>(), se = m["se"].get<double>();
      worst_se = std::max(worst_se, se / ratio);
      worst_drift = std::max(worst_drift, m["doubling_drift"].get<double>() / m["se_half_paths"].get<double>());
      v.require(std::isfinite(ratio) && se < 0.1 * ratio, std::string(id) + " SE < 10%");
      v.require(m["doubling_drift"].get<double>() < 2.0 * m["se_half_paths"].get<double>(),
                std::string(id) + " doubling drift < 2 SE");
    }
    bool stated = false;
    for (const auto& note : rep.notes) stated = stated || note.find("not reproducible") != std::string::npos;
    v.require(stated, std::string(id) + " states that N is not reproducible");
    v.require(!rep.values["max_ratio"].is_null() && std::isfinite(rep.value("max_ratio")), std::string(id) + " finite");
    v.detail << id << ": max " << (rep.values["max_ratio"].is_null() ? NAN : rep.value("max_ratio"))
             << " worst SE/ratio " << worst_se << " worst drift/SE " << worst_drift << "; ";
  }
}

// 9. Bernstein suite.
void bernstein_suite(Verdict& v) {
  double worst = 0.0;
  for (int id = 1; id <= 6; ++id) {
    const std::vector<double> params = id <= 2 ? std::vector<double>{0.25, 0.75}
                                       : id == 3 ? std::vector<double>{0.5, 0.25}
                                       : id == 4 ? std::vector<double>{0.5, 0.25}
                                                 : std::vector<double>{0.5};
    const auto phi = bernstein_catalog(id, params);
    for (double s : log_grid(1e-6, 1e6, 61)) worst = std::max(worst, std::abs(generalized_inverse(phi, phi(s)) / s - 1.0));
  }
  const auto env = scaling_check(bernstein_catalog(1, {0.25, 0.75}), log_grid(1e-8, 1e8, 161));
  const double d1 = env.value("delta1_hat"), d2 = env.value("delta2_hat");
  v.detail << "round trip " << worst << ", envelope (" << d1 << ", " << d2 << ")";
  v.require(worst <= 1e-9, "round trip 1e-9");
  v.require(std::abs(d1 - 0.25) <= 0.02 && std::abs(d2 - 0.75) <= 0.02, "envelope within 0.02");

  // phi(lambda) = lambda through every pipeline stage against heat, bit for bit.
  const auto heat = symbol_from_id("heat", 1);
  const auto sub = subordinate_symbol(bernstein_power(1.0), 1);
  bool same = true;
  const SpaceTimeGrid grid(16.0, 512, 1);
  same = same && kernel_field(heat, 0.1, 0.6, grid).values == kernel_field(sub, 0.1, 0.6, grid).values;
  same = same && half_power_kernel(heat, 0.1, 0.6, grid).values == half_power_kernel(sub, 0.1, 0.6, grid).values;
  for (auto kind : {LemmaKind::tail, LemmaKind::translation, LemmaKind::time}) {
    const char* lemma = kind == LemmaKind::tail ? "mc1" : kind == LemmaKind::translation ? "mc2" : "mc3";
    const auto sweep = default_lemma_sweep(lemma, grid);
    same = same && lemma_left_sides(heat, grid, kind, sweep) == lemma_left_sides(sub, grid, kind, sweep);
  }
  const auto rho = parabolic_metric(2.0);
  const SpaceTimePoint X{1.0, {0.3}}, Y{0.9, {0.0}};
  same = same && hormander_integral(heat, rho, X, Y, 2.0, grid) == hormander_integral(sub, rho, X, Y, 2.0, grid);
  const SpaceTimeGrid lp(M_PI, 32, 1, 1.0, 4);
  for (const auto& f : lpaley_battery(heat)) {
    const auto field = f.make(lp);
    same = same && g_operator(heat, field).field.values == g_operator(sub, field).field.values;
  }
  const SpaceTimeGrid sg(8.0, 32, 1, 1.0, 16);
  const NoiseEnsemble noise(3, 8, 2, 16, 1.0);
  for (const auto& g : spde_battery(sg, 2, 3, 3))
    for (std::size_t path = 0; path < noise.paths(); ++path)
      same = same && stochastic_convolution(heat, g, noise, sg, half_power_multiplier(heat, sg), path).values ==
                         stochastic_convolution(sub, g, noise, sg, half_power_multiplier(sub, sg), path).values;
  v.detail << ", identity pipeline " << (same ? "bit-identical" : "differs");
  v.require(same, "phi = identity pipeline bit-identical to heat");
}

std::string slurp(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) ++count_b;
  if (files.size() != count_b) return false;
  for (const auto& f : files)
    if (!fs::exists(b / f) || slurp(a / f) != slurp(b / f)) return false;
  return true;
}

// 10. Reproducibility through the command-line tool.
void reproducibility(Verdict& v) {
  const fs::path root = fs::temp_directory_path() / "spdelab_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string exe = SPDELAB_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + exe + "\" " + args + " > \"" + (root / "stdout.txt").string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  const int first = run("all --threads 1 --out \"" + (root / "t1").string() + "\"");
  v.require(first == 0, "first run exit status 0");
  for (int threads : {1, 4, 8}) {
    const fs::path out = root / ("rerun" + std::to_string(threads));
    const int status = run("--config \"" + (root / "t1" / "manifest.json").string() + "\" --threads " +
                           std::to_string(threads) + " --out \"" + out.string() + "\"");
    const bool same = status == first && same_tree(root / "t1", out);
    v.detail << threads << " threads " << (same ? "identical" : "differs") << "; ";
    v.require(same, "rerun with " + std::to_string(threads) + " threads byte-identical");
  }
  v.detail << "reports, tables and manifests compared";
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)(Verdict&)>> criteria = {
      {"closed-form kernel exactness", kernels_exact},
      {"scaling relations", scaling_relations},
      {"symbol certificates", symbol_certificates},
      {"Ito isometry", ito_isometry},
      {"Hormander certificate", hormander},
      {"kernel lemma exponents", lemma_exponents},
      {"Littlewood-Paley", littlewood_paley},
      {"maximal Lp-regularity", maximal_regularity},
      {"Bernstein suite", bernstein_suite},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failures += v.passed ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", v.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

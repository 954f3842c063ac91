#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spdelab/bernstein.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/symbols.hpp"

using namespace spdelab;

namespace {

// (1/2L) sum_k m(xi_k) exp(-tau |xi_k|^g) cos(xi_k x) by direct summation,
// Nyquist mode excluded.
double direct_series(double x, double tau, double L, int n, double g, double power) {
  double s = power == 0.0 ? 1.0 : 0.0;
  for (int k = 1; k < n / 2; ++k) {
    const double xi = std::numbers::pi * k / L;
    s += 2.0 * std::pow(xi, power) * std::exp(-tau * std::pow(xi, g)) * std::cos(xi * x);
  }
  return s / (2.0 * L);
}

double max_abs_diff(const KernelField& kf, const std::function<double(double)>& ref) {
  double e = 0.0;
  for (std::size_t i = 0; i < kf.values.size(); ++i)
    e = std::max(e, std::abs(kf.values[i].real() - ref(kf.grid.coordinate(i)[0])));
  return e;
}

}  // namespace

TEST_CASE("heat kernel matches the periodized Gaussian") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const auto kf = kernel_field(make_heat_symbol(1), 0.0, 0.25, grid);
  CHECK(max_abs_diff(kf, [](double x) { return oracle::periodic_gaussian(x, 0.25, 16.0); }) <= 1e-9);
  CHECK(kf.max_imag() <= 1e-12);
  CHECK(kf.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gamma = 1 kernel matches the periodized Cauchy density") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const auto kf = kernel_field(make_fractional_symbol(1, 1.0), 0.0, 0.25, grid);
  CHECK(max_abs_diff(kf, [](double x) { return oracle::periodic_cauchy(x, 0.25, 16.0); }) <= 1e-7);
  CHECK(kf.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fractional power kernels agree with direct Fourier sums") {
  const SpaceTimeGrid grid(8.0, 256, 1);
  for (double g : {0.5, 1.0, 1.5, 2.0}) {
    const auto sym = make_fractional_symbol(1, g);
    const auto kf = half_power_kernel(sym, 0.2, 0.7, grid);
    const double err =
        max_abs_diff(kf, [&](double x) { return direct_series(x, 0.5, 8.0, 256, g, 0.5 * g); });
    CHECK(err <= 1e-11 * std::max(1.0, kf.max_norm()));
    CHECK(std::abs(kf.mass()) <= 1e-12);
  }
}

TEST_CASE("power 0 reproduces the plain kernel") {
  const SpaceTimeGrid grid(8.0, 128, 2);
  const auto sym = make_fractional_symbol(2, 1.5);
  const auto a = kernel_field(sym, 0.0, 0.3, grid);
  const auto b = frac_power_kernel(sym, 0.0, 0.3, grid, 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("Plancherel identity on the lattice") {
  const SpaceTimeGrid grid(8.0, 64, 2);
  for (const char* id : {"heat", "frac:1", "order4", "nonlocal:1.5:tilt"}) {
    const auto kf = half_power_kernel(symbol_from_id(id, 2), 0.0, 0.1, grid);
    CHECK(kf.l2_norm_squared() == doctest::Approx(kf.plancherel_l2_squared()).epsilon(1e-10));
  }
}

TEST_CASE("kernel construction rejects reversed times") {
  const SpaceTimeGrid grid(8.0, 64, 1);
  CHECK_THROWS_AS(kernel_field(make_heat_symbol(1), 1.0, 1.0, grid), Error);
  CHECK_THROWS_AS(kernel_field(make_heat_symbol(2), 0.0, 1.0, grid), Error);
}

TEST_CASE("q1 at unit scaling is the unit-time kernel") {
  const SpaceTimeGrid grid(16.0, 512, 1);
  const auto [q1h, q2h] = scaled_kernels_q(make_heat_symbol(1), 0.3, 0.7, grid);
  CHECK(max_abs_diff(q1h, [](double x) { return oracle::periodic_gaussian(x, 1.0, 16.0); }) <= 1e-9);
  const auto [q1c, q2c] = scaled_kernels_q(make_fractional_symbol(1, 1.0), 0.3, 0.7, grid);
  CHECK(max_abs_diff(q1c, [](double x) { return oracle::periodic_cauchy(x, 1.0, 16.0); }) <= 1e-9);
}

TEST_CASE("scaling relations hold for catalog symbols") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  for (const char* id : {"heat", "frac:1", "frac:1.5", "order4"}) {
    const auto rep = check_scaling_relations(symbol_from_id(id, 1), 0.0, 0.5, grid);
    INFO(id);
    CHECK(rep.passed);
    CHECK(rep.value("residual_q1_relation") <= 1e-7);
    CHECK(rep.value("residual_q2_relation") <= 1e-7);
  }
}

TEST_CASE("tail integral against a direct-sum oracle") {
  const double L = 16.0;
  const int n = 1024;
  const SpaceTimeGrid grid(L, n, 1);
  const auto kf = half_power_kernel(make_heat_symbol(1), 0.0, 0.25, grid);
  const double dx = grid.dx();
  double ref = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = -L + j * dx;
    if (std::abs(x) >= 1.0) ref += std::abs(direct_series(x, 0.25, L, n, 2.0, 1.0)) * dx;
  }
  CHECK(l1_tail(kf, 1.0) == doctest::Approx(ref).epsilon(1e-10));
  CHECK(l1_tail(kf, 0.0) == doctest::Approx(kf.l1_norm()).epsilon(1e-14));
  double prev = l1_tail(kf, 0.0);
  for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double v = l1_tail(kf, c);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_FALSE(tail_truncated(kf, 4.0));
  CHECK(tail_truncated(kf, 17.0));
  CHECK(l1_tail(kf, 17.0) == 0.0);
}

TEST_CASE("far field of the heat half-power kernel") {
  // (-Delta)^{1/2} p_tau(x) -> -1/(pi x^2) away from the origin.
  const SpaceTimeGrid grid(64.0, 8192, 1);
  const auto kf = half_power_kernel(make_heat_symbol(1), 0.0, 1e-3, grid);
  for (double x : {1.0, 2.0, 4.0}) {
    const std::size_t i = static_cast<std::size_t>(std::lround((x + 64.0) / grid.dx()));
    CHECK(kf.values[i].real() == doctest::Approx(-1.0 / (std::numbers::pi * x * x)).epsilon(2e-3));
  }
}

TEST_CASE("translation differences") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const auto sym = make_heat_symbol(1);
  const auto kf = half_power_kernel(sym, 0.0, 0.5, grid);
  const std::vector<double> zero{0.0};
  CHECK(translation_difference_l1(kf, zero) == 0.0);
  const std::vector<double> period{32.0};
  CHECK(translation_difference_l1(kf, period) <= 1e-14);
  const auto grad = gradient_kernel(sym, 0.0, 0.5, grid, 0);
  for (double h : {0.0625, 0.25, 1.0, 4.0}) {
    const std::vector<double> hv{h};
    const double v = translation_difference_l1(kf, hv);
    CHECK(v <= h * grad.l1_norm() * (1.0 + 1e-6));
    CHECK(v <= 2.0 * kf.l1_norm() * (1.0 + 1e-12));
  }
  const std::vector<double> off{0.01};
  CHECK_THROWS_AS(translation_difference_l1(kf, off), Error);
}

TEST_CASE("gradient kernel is the derivative of the half-power kernel") {
  const SpaceTimeGrid grid(8.0, 512, 1);
  const auto sym = make_fractional_symbol(1, 1.5);
  const auto kf = half_power_kernel(sym, 0.0, 0.4, grid);
  const auto grad = gradient_kernel(sym, 0.0, 0.4, grid, 0);
  const double dx = grid.dx();
  double e = 0.0;
  for (std::size_t i = 2; i + 2 < kf.values.size(); ++i) {
    const double fd = (-kf.values[i + 2].real() + 8.0 * kf.values[i + 1].real() - 8.0 * kf.values[i - 1].real() +
                       kf.values[i - 2].real()) /
                      (12.0 * dx);
    e = std::max(e, std::abs(fd - grad.values[i].real()));
  }
  CHECK(e <= 1e-3 * grad.max_norm());
}

TEST_CASE("time differences") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const auto sym = make_heat_symbol(1);
  CHECK(time_difference_l1(sym, 0.0, 1.0, 1.0, grid, KernelKind::frac_p) == 0.0);
  const double a = time_difference_l1(sym, 0.0, 1.0, 1.1, grid, KernelKind::p);
  const double b = time_difference_l1(sym, 0.0, 1.0, 1.2, grid, KernelKind::p);
  CHECK(a > 0.0);
  CHECK(b > a);
  CHECK(a <= 2.0);
  CHECK_THROWS_AS(time_difference_l1(sym, 1.0, 1.0, 1.1, grid, KernelKind::p), Error);
  CHECK_THROWS_AS(time_difference_l1(sym, 0.0, 1.0, 1.1, grid, KernelKind::q1), Error);

  // p(0,1.1) - p(0,1) has zero mass, so the signed integral vanishes.
  const auto p1 = kernel_field(sym, 0.0, 1.0, grid);
  const auto p2 = kernel_field(sym, 0.0, 1.1, grid);
  double signed_sum = 0.0;
  for (std::size_t i = 0; i < p1.values.size(); ++i) signed_sum += (p2.values[i] - p1.values[i]).real();
  CHECK(std::abs(signed_sum * grid.dx()) <= 1e-13);

  // Heat p-kernels: lattice sum and continuum integral of |p_{1.1} - p_1|.
  double lattice = 0.0;
  for (std::size_t i = 0; i < p1.values.size(); ++i) {
    const double x = grid.coordinate(i)[0];
    lattice += std::abs(oracle::periodic_gaussian(x, 1.1, 16.0) - oracle::periodic_gaussian(x, 1.0, 16.0));
  }
  CHECK(a == doctest::Approx(lattice * grid.dx()).epsilon(1e-10));
  const double ref = oracle::integrate(
      [](double x) { return std::abs(oracle::periodic_gaussian(x, 1.1, 16.0) - oracle::periodic_gaussian(x, 1.0, 16.0)); },
      -16.0, 16.0);
  CHECK(a == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("kernel lemma checks") {
  const SpaceTimeGrid grid(16.0, 2048, 1);
  for (const char* id : {"heat", "frac:1"}) {
    INFO(id);
    const auto sym = symbol_from_id(id, 1);
    const auto mc2 = verify_kernel_lemma(sym, grid, "mc2", default_lemma_sweep("mc2", grid));
    CHECK(mc2.value("slope") == doctest::Approx(2.0).epsilon(0.05));
    CHECK(mc2.passed);
    const auto mc3 = verify_kernel_lemma(sym, grid, "mc3", default_lemma_sweep("mc3", grid));
    CHECK(mc3.value("slope") == doctest::Approx(2.0).epsilon(0.05));
    CHECK(mc3.passed);
    const auto mc1 = verify_kernel_lemma(sym, grid, "mc1", default_lemma_sweep("mc1", grid));
    CHECK(mc1.value("slope") < 0.0);
    CHECK(mc1.passed);
    const auto fq = verify_kernel_lemma(sym, grid, "freq", default_lemma_sweep("freq", grid));
    CHECK(fq.passed);
    CHECK(std::abs(fq.value("slope")) <= 1e-6);
  }
  CHECK(lemma_delta(2.0) == 0.25);
  CHECK(lemma_delta(0.5) == 0.125);
  CHECK_THROWS_AS(verify_kernel_lemma(make_heat_symbol(1), grid, "nope", LemmaSweep{}), Error);
}

TEST_CASE("subordinate lemma with phi = identity matches the heat lemma") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const auto sweep = default_lemma_sweep("mc2", grid);
  const auto heat = lemma_left_sides(make_heat_symbol(1), grid, LemmaKind::translation, sweep);
  const auto sub = lemma_left_sides(subordinate_symbol(bernstein_power(1.0), 1), grid, LemmaKind::translation, sweep);
  REQUIRE(heat.size() == sub.size());
  for (std::size_t i = 0; i < heat.size(); ++i) CHECK(sub[i] == heat[i]);
}

TEST_CASE("subordinate lemmas and kernel bounds") {
  const SpaceTimeGrid grid(16.0, 1024, 1);
  const auto phi = bernstein_catalog(1, {0.25, 0.75});
  for (const char* which : {"615_1", "615_2", "615_3"}) {
    INFO(which);
    const std::string base = std::string(which) == "615_1" ? "mc1" : std::string(which) == "615_2" ? "mc2" : "mc3";
    CHECK(verify_subordinate_lemma(phi, grid, which, default_lemma_sweep(base, grid)).passed);
  }
  for (const char* which : {"as_ker", "as_ker2", "as_ker3"}) {
    INFO(which);
    const auto rep = verify_bernstein_kernel_bounds(phi, 1, which);
    CHECK(rep.passed);
    CHECK(std::isfinite(rep.value("sup_ratio")));
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "spdelab/bernstein.hpp"
#include "spdelab/metric.hpp"
#include "spdelab/symbols.hpp"

using namespace spdelab;

namespace {

SpaceTimePoint random_point(std::mt19937_64& rng, int d, double T, double L) {
  std::uniform_real_distribution<double> ut(0.0, T), ux(-L, L);
  SpaceTimePoint p{ut(rng), std::vector<double>(d)};
  for (auto& v : p.x) v = ux(rng);
  return p;
}

std::vector<QuasiMetric> metric_zoo() {
  return {parabolic_metric(2.0), parabolic_metric(1.0), parabolic_metric(0.5), parabolic_metric(1.5),
          subordinate_metric(bernstein_power(0.5)), subordinate_metric(bernstein_catalog(1, {0.25, 0.75})),
          subordinate_metric(bernstein_catalog(5, {0.5}))};
}

}  // namespace

TEST_CASE("parabolic metric examples") {
  const auto rho = parabolic_metric(2.0);
  const SpaceTimePoint X{2.0, {0.0, 0.0}}, Y{1.0, {3.0, 4.0}};
  CHECK(rho(X, Y) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(rho.hormander_constant() == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(rho.triangle_constant() == 1.0);
  CHECK(parabolic_metric(0.5).triangle_constant() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(parabolic_metric(1.0).hormander_constant() == 8.0);
  CHECK_THROWS_AS(parabolic_metric(0.0), Error);
}

TEST_CASE("subordinate metric examples") {
  const auto root = subordinate_metric(bernstein_power(0.5));
  const SpaceTimePoint X{1.0, {0.0}}, Y{0.5, {1.0}};
  CHECK(root(X, Y) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(root.inverse_doubling().value() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(root.hormander_constant() == doctest::Approx(16.0).epsilon(1e-9));
  const auto lin = subordinate_metric(bernstein_power(1.0));
  CHECK(lin.inverse_doubling().value() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lin.hormander_constant() == doctest::Approx(8.0).epsilon(1e-12));
  const auto cat = subordinate_metric(bernstein_catalog(1, {0.25, 0.75}));
  CHECK(cat.hormander_constant() == doctest::Approx(4.0 * cat.inverse_doubling().value()).epsilon(1e-15));
  CHECK(cat.inverse_doubling().value() == doctest::Approx(16.0).epsilon(1e-3));
  CHECK_THROWS_AS(subordinate_metric(BernsteinFunction("flat", [](double) { return 1.0; }, std::nullopt)), Error);
}

TEST_CASE("time part and its inverse") {
  for (const auto& rho : metric_zoo()) {
    INFO(rho.label());
    for (double g : {1e-9, 1e-4, 0.01, 0.5, 3.0, 1e3}) {
      const double v = rho.time_part(g);
      CHECK(rho.gap_for(v) == doctest::Approx(g).epsilon(1e-8));
    }
    CHECK(rho.time_part(0.0) == 0.0);
    CHECK(rho.gap_for(0.0) == 0.0);
  }
}

TEST_CASE("quasi-metric axioms on random triples") {
  for (const auto& rho : metric_zoo()) {
    INFO(rho.label());
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
      const auto X = random_point(rng, 2, 4.0, 4.0);
      const auto Y = random_point(rng, 2, 4.0, 4.0);
      const auto Z = random_point(rng, 2, 4.0, 4.0);
      const double xy = rho(X, Y);
      worst = std::max(worst, xy / (rho(X, Z) + rho(Z, Y)));
      if (k < 1000) {
        CHECK(rho(X, X) == 0.0);
        CHECK(xy == rho(Y, X));
        CHECK(xy > 0.0);
      }
    }
    CHECK(worst <= rho.triangle_constant() * (1.0 + 1e-12));
  }
}

TEST_CASE("gamma0 identity and exterior region") {
  for (const auto& rho : metric_zoo()) {
    INFO(rho.label());
    const double C0 = rho.hormander_constant(), N = rho.triangle_constant();
    CHECK(rho.gamma0() == (2.0 * C0 * N + 1.0) * N);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const SpaceTimePoint X0{2.0, {0.0}};
    const double c = 0.05;
    int tested = 0;
    const double g_in = rho.gap_for(0.5 * c);
    const double outer = 4.0 * rho.gamma0() * c;
    const double g_out = rho.gap_for(outer);
    for (int k = 0; k < 20000; ++k) {
      // X, Y inside B_c(X0) by construction, Z outside B_{gamma0 c}(X0).
      const SpaceTimePoint X{2.0 + g_in * u(rng), {0.5 * c * u(rng)}}, Y{2.0 + g_in * u(rng), {0.5 * c * u(rng)}};
      REQUIRE(rho(X, X0) < c);
      REQUIRE(rho(Y, X0) < c);
      const SpaceTimePoint Z{2.0 + g_out * u(rng), {outer * u(rng)}};
      if (rho(Z, X0) < rho.gamma0() * c) continue;
      ++tested;
      CHECK(rho(Z, X) >= C0 * rho(X, Y));
    }
    CHECK(tested > 1000);
  }
  auto rho = parabolic_metric(2.0);
  rho.override_hormander_constant(3.0);
  CHECK(rho.hormander_constant() == 3.0);
  CHECK(rho.gamma0() == 7.0);
  CHECK_THROWS_AS(rho.override_hormander_constant(0.0), Error);
}

TEST_CASE("doubling ratios") {
  const SpaceTimeBox box{4.0, 4.0, 1};
  const std::vector<SpaceTimePoint> centers{{2.0, {0.0}}, {1.5, {0.5}}};
  // Parabolic gamma = 2, d = 1: |B_c| = (4/3) c^3, ratio 2^3.
  const auto par = doubling_check(parabolic_metric(2.0), 2.0, centers, {0.25, 0.5}, box);
  CHECK(par.passed);
  CHECK(par.value("max_ratio_doubled") == doctest::Approx(8.0).epsilon(0.03));
  CHECK(par.value("min_ratio") == doctest::Approx(8.0).epsilon(0.03));
  // phi = lambda^{1/2}: time part |t - s|, |B_c| = 2 c^2.
  const auto sub = doubling_check(subordinate_metric(bernstein_power(0.5)), 2.0, centers, {0.25, 0.5}, box);
  CHECK(sub.passed);
  CHECK(sub.value("max_ratio_doubled") == doctest::Approx(4.0).epsilon(0.03));
  const auto one = doubling_check(parabolic_metric(2.0), 1.0, centers, {0.25}, box);
  CHECK(one.value("max_ratio") == doctest::Approx(1.0).epsilon(0.03));
  // A center near the edge is discarded.
  const auto edge = doubling_check(parabolic_metric(2.0), 2.0, {{2.0, {3.9}}}, {0.25}, box);
  CHECK_FALSE(edge.passed);
  CHECK(edge.value("discarded") == 1.0);
}

TEST_CASE("ball volume against the closed form") {
  const SpaceTimeBox box{4.0, 4.0, 1};
  const SpaceTimePoint X{2.0, {0.0}};
  const double v = ball_volume(parabolic_metric(2.0), X, 0.5, box, 400000, 3);
  // |B_c| = int_{|tau| < c^2} 2 (c - |tau|^{1/2}) dtau = (4/3) c^3.
  CHECK(v == doctest::Approx(4.0 / 3.0 * 0.125).epsilon(0.01));
  CHECK(ball_volume(parabolic_metric(2.0), X, 0.5, box, 1000, 3) ==
        ball_volume(parabolic_metric(2.0), X, 0.5, box, 1000, 3));
}

TEST_CASE("hormander integral: trivial and symmetric cases") {
  const auto sym = make_heat_symbol(1);
  const auto rho = parabolic_metric(2.0);
  const SpaceTimeGrid grid(16.0, 1024, 1, 2.0);
  const SpaceTimePoint X{1.0, {0.0}};
  CHECK(hormander_integral(sym, rho, X, X, 2.0, grid) == 0.0);

  const SpaceTimePoint Y{1.0, {0.25}};
  const double a = hormander_integral(sym, rho, X, Y, 2.0, grid);
  CHECK(a > 0.0);
  CHECK(std::isfinite(a));
  CHECK(hormander_integral(sym, rho, Y, X, 2.0, grid) == doctest::Approx(a).epsilon(1e-9));

  const SpaceTimePoint Y2{0.9, {0.1}};
  const double b = hormander_integral(sym, rho, X, Y2, 2.0, grid);
  for (double shift : {0.3, -2.7, 5.0}) {
    const SpaceTimePoint Xs{1.0, {shift}}, Ys{0.9, {0.1 + shift}};
    CHECK(hormander_integral(sym, rho, Xs, Ys, 2.0, grid) == doctest::Approx(b).epsilon(1e-9));
  }
  CHECK_THROWS_AS(hormander_integral(sym, rho, SpaceTimePoint{3.0, {0.0}}, Y, 2.0, grid), Error);
  CHECK_THROWS_AS(hormander_integral(make_heat_symbol(2), rho, X, Y, 2.0, grid), Error);
}

TEST_CASE("hormander integral: heat golden value") {
  const auto sym = make_heat_symbol(1);
  const auto rho = parabolic_metric(2.0);
  const SpaceTimePoint X{1.0, {0.0}}, Y{0.9, {0.1}};
  const SpaceTimeGrid grid(16.0, 4096, 1, 2.0);
  const double coarse = hormander_integral(sym, rho, X, Y, 2.0, grid);
  const double fine = hormander_integral(sym, rho, X, Y, 2.0, grid.refined());
  CHECK(coarse / fine < 1.1);
  CHECK(fine / coarse < 1.1);
  CHECK(coarse == doctest::Approx(0.0107129359015).epsilon(1e-8));
  // A finer time rule changes the value by far less than the refinement test allows.
  HormanderOptions dense;
  dense.cluster = {20, 10, 1};
  CHECK(hormander_integral(sym, rho, X, Y, 2.0, grid, dense) == doctest::Approx(coarse).epsilon(1e-3));
}

TEST_CASE("subordinate identity reproduces the heat integrand") {
  const auto heat = make_heat_symbol(1);
  const auto sub = subordinate_symbol(bernstein_power(1.0), 1);
  const auto rho = parabolic_metric(2.0);
  const SpaceTimeGrid grid(16.0, 1024, 1, 2.0);
  const SpaceTimePoint X{1.0, {0.0}}, Y{0.95, {0.125}};
  CHECK(hormander_integral(sub, rho, X, Y, 2.0, grid) == hormander_integral(heat, rho, X, Y, 2.0, grid));
}

TEST_CASE("pair sampler") {
  const auto rho = parabolic_metric(2.0);
  const SpaceTimeGrid grid(16.0, 1024, 1, 2.0);
  PairSampler ps;
  ps.pairs_per_scale = 6;
  const auto resolved = resolve_sampler(rho, ps, grid);
  CHECK(resolved.t_late == 1.0);
  CHECK(resolved.rho_min * 256.0 * rho.hormander_constant() == doctest::Approx(16.0));
  const auto pairs = sample_pairs(rho, ps, grid);
  CHECK(pairs.size() == 48);
  for (const auto& p : pairs) {
    const double r0 = resolved.rho_min * std::ldexp(1.0, p.scale);
    CHECK(p.rho >= r0 * (1.0 - 1e-9));
    CHECK(p.rho < 2.0 * r0 * (1.0 + 1e-9));
    CHECK(p.rho == doctest::Approx(rho(p.X, p.Y)));
    const double steps = (p.Y.x[0] - p.X.x[0]) / grid.dx();
    CHECK(steps == std::round(steps));
    CHECK(std::max(p.X.t, p.Y.t) == 1.0);
  }
  const auto again = sample_pairs(rho, ps, grid);
  for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(again[i].Y.t == pairs[i].Y.t);
}

TEST_CASE("hormander sup estimate is scale-flat for the heat kernel") {
  const auto sym = make_heat_symbol(1);
  const auto rho = parabolic_metric(2.0);
  const SpaceTimeGrid grid(16.0, 4096, 1, 2.0);
  PairSampler ps;
  ps.pairs_per_scale = 2;
  const auto rep = hormander_sup_estimate(sym, rho, ps, 2.0, grid);
  CHECK(std::isfinite(rep.value("sup")));
  CHECK(rep.value("refinement_drift") < 0.1);
  CHECK(rep.value("scale_slope") <= 0.1);
  CHECK(rep.values["pairs"].size() == 16);
  CHECK(rep.values["per_scale"].size() == 8);
}

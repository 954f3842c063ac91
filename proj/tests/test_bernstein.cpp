#include <cmath>
#include <vector>

#include "doctest.h"
#include "spdelab/bernstein.hpp"

using namespace spdelab;

namespace {

// Monotone scan on a fine log grid with log-log interpolation between the
// bracketing nodes.
double scan_inverse(const BernsteinFunction& phi, double t, double lo, double hi, int points) {
  const double step = std::log(hi / lo) / (points - 1);
  double prev_s = lo, prev_v = phi(lo);
  for (int i = 1; i < points; ++i) {
    const double s = lo * std::exp(step * i);
    const double v = phi(s);
    if (v >= t) {
      const double w = std::log(t / prev_v) / std::log(v / prev_v);
      return std::exp(std::log(prev_s) + w * (std::log(s) - std::log(prev_s)));
    }
    prev_s = s;
    prev_v = v;
  }
  return hi;
}

}  // namespace

TEST_CASE("catalog values") {
  CHECK(bernstein_catalog(1, {0.25, 0.75})(1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(bernstein_catalog(2, {0.5, 0.5})(4.0) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(bernstein_catalog(5, {0.5})(1e-12) <= 1e-6);
  CHECK(bernstein_catalog(5, {1.0 - 1e-9})(1e-10) == doctest::Approx(0.5e-10).epsilon(1e-6));
  CHECK(bernstein_catalog(6, {1.0 - 1e-9})(1e-10) == doctest::Approx(1e-10 / 6.0).epsilon(1e-6));
  // Small-lambda series matches the direct formula where both are accurate.
  const auto six = bernstein_catalog(6, {0.5});
  const double direct = std::pow(std::log(std::sinh(std::sqrt(1e-6)) / std::sqrt(1e-6)), 0.5);
  CHECK(six(0.999999e-6) == doctest::Approx(direct).epsilon(1e-5));
  // Large-argument branches stay finite and monotone.
  for (int id : {5, 6}) {
    const auto phi = bernstein_catalog(id, {0.5});
    CHECK(phi(1e12) > phi(1e11));
    CHECK(std::isfinite(phi(1e12)));
  }
  CHECK(bernstein_catalog(3, {0.5, 0.3})(std::exp(1.0) - 1.0) == doctest::Approx(std::pow(std::exp(1.0) - 1.0, 0.5)).epsilon(1e-14));
  CHECK(bernstein_catalog(4, {0.5, 0.3})(std::exp(1.0) - 1.0) == doctest::Approx(std::pow(std::exp(1.0) - 1.0, 0.5)).epsilon(1e-14));
}

TEST_CASE("catalog parameter ranges are enforced") {
  CHECK_THROWS_AS(bernstein_catalog(1, {0.75, 0.25}), Error);
  CHECK_THROWS_AS(bernstein_catalog(1, {0.0, 0.5}), Error);
  CHECK_THROWS_AS(bernstein_catalog(3, {0.5, 0.6}), Error);
  CHECK_THROWS_AS(bernstein_catalog(4, {0.3, 0.4}), Error);
  CHECK_THROWS_AS(bernstein_catalog(5, {1.0}), Error);
  CHECK_THROWS_AS(bernstein_catalog(7, {0.5}), Error);
  CHECK_THROWS_AS(bernstein_catalog(2, {0.5}), Error);
  CHECK_THROWS_AS(bernstein_power(1.5), Error);
  CHECK_THROWS_AS(bernstein_power(0.5)(1e13), Error);
  CHECK_THROWS_AS(bernstein_from_id("nope:1"), Error);
  CHECK(bernstein_from_id("alpha-beta:0.25:0.75")(1.0) == 2.0);
  CHECK(bernstein_from_id("1:0.25:0.75")(1.0) == 2.0);
  CHECK(bernstein_from_id("power:0.5")(9.0) == 3.0);
}

TEST_CASE("generalized inverse") {
  CHECK(generalized_inverse(bernstein_power(0.5), 3.0) == doctest::Approx(9.0).epsilon(1e-11));
  CHECK(generalized_inverse(bernstein_catalog(1, {0.25, 0.75}), 2.0) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(generalized_inverse(bernstein_power(1.0), 3.0) == 3.0);
  CHECK_THROWS_AS(generalized_inverse(bernstein_power(0.5), 1e7), Error);
  CHECK_THROWS_AS(generalized_inverse(bernstein_power(0.5), -1.0), Error);

  const auto three = bernstein_catalog(3, {0.4, 0.3});
  for (double t : {0.05, 0.7, 3.0, 40.0}) {
    const double scan = scan_inverse(three, t, 1e-4, 1e4, 1000000);
    CHECK(generalized_inverse(three, t) == doctest::Approx(scan).epsilon(1e-8));
  }
}

TEST_CASE("inverse round trips on the log grid") {
  const std::vector<BernsteinFunction> members{
      bernstein_power(0.5),           bernstein_catalog(1, {0.25, 0.75}), bernstein_catalog(2, {0.5, 0.5}),
      bernstein_catalog(3, {0.4, 0.3}), bernstein_catalog(4, {0.6, 0.3}),  bernstein_catalog(5, {0.7}),
      bernstein_catalog(6, {0.7})};
  for (const auto& phi : members) {
    double worst_s = 0.0, worst_t = 0.0;
    for (double s : log_grid(1e-8, 1e8, 321)) {
      worst_s = std::max(worst_s, std::abs(generalized_inverse(phi, phi(s)) / s - 1.0));
      const double t = phi(s);
      worst_t = std::max(worst_t, std::abs(phi(generalized_inverse(phi, t)) / t - 1.0));
    }
    INFO(phi.label());
    CHECK(worst_s <= 1e-9);
    CHECK(worst_t <= 1e-10);
  }
}

TEST_CASE("scaling envelopes") {
  const auto grid = log_grid(1e-8, 1e8, 161);
  const auto one = scaling_check(bernstein_catalog(1, {0.25, 0.75}), grid);
  CHECK(one.passed);
  CHECK(one.value("delta1_hat") == doctest::Approx(0.25).epsilon(0.02 / 0.25));
  CHECK(std::abs(one.value("delta2_hat") - 0.75) <= 0.02);

  const auto half = scaling_check(bernstein_power(0.5), grid);
  CHECK(std::abs(half.value("delta1_hat") - 0.5) <= 1e-12);
  CHECK(std::abs(half.value("delta2_hat") - 0.5) <= 1e-12);
  CHECK(half.passed);

  // Larger forward upper exponent gives a smaller inverse lower exponent.
  const auto a = scaling_check(bernstein_catalog(1, {0.25, 0.5}), grid);
  const auto b = scaling_check(bernstein_catalog(1, {0.25, 0.75}), grid);
  CHECK(a.value("delta2_hat") < b.value("delta2_hat"));
  CHECK(a.value("inverse_delta1_hat") > b.value("inverse_delta1_hat"));
  CHECK(b.value("inverse_delta1_hat") <= b.value("inverse_delta2_hat"));

  CHECK_THROWS_AS(scaling_check(bernstein_power(0.5), log_grid(1.0, 1e6, 10)), Error);
}

TEST_CASE("(H1)/(H2) sufficient conditions") {
  const auto lam = log_grid(1e-6, 1e6, 49);
  const auto ts = log_grid(1e-6, 1e6, 49);
  for (const auto& phi : {bernstein_catalog(1, {0.25, 0.75}), bernstein_catalog(2, {0.5, 0.5}),
                          bernstein_catalog(5, {0.7}), bernstein_catalog(6, {0.7})}) {
    const auto rep = h_conditions_check(phi, lam, ts);
    INFO(phi.label());
    CHECK(rep.passed);
    CHECK(rep.value("c1") > 0.0);
  }
  CHECK_FALSE(h_conditions_check(bernstein_power(1.0), lam, ts).passed);
}

TEST_CASE("Bernstein invariants for every catalog member") {
  for (const auto& phi : {bernstein_power(0.5), bernstein_power(1.0), bernstein_catalog(1, {0.25, 0.75}),
                          bernstein_catalog(2, {0.5, 0.5}), bernstein_catalog(3, {0.4, 0.3}),
                          bernstein_catalog(4, {0.6, 0.3}), bernstein_catalog(5, {0.7}), bernstein_catalog(6, {0.7})}) {
    const auto rep = bernstein_invariants(phi);
    INFO(phi.label() << " " << rep.to_json().dump());
    CHECK(rep.passed);
  }
}

TEST_CASE("inverse doubling constant") {
  CHECK(inverse_doubling_constant(bernstein_power(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(inverse_doubling_constant(bernstein_power(0.5)) == doctest::Approx(4.0).epsilon(1e-10));
  const double n = inverse_doubling_constant(bernstein_catalog(1, {0.25, 0.75}));
  CHECK(n > 2.0 * std::sqrt(2.0));
  CHECK(n <= 16.0 * (1.0 + 1e-10));
}

TEST_CASE("subordinate symbols") {
  const std::vector<double> xi{0.6, 0.8};
  const auto s1 = subordinate_symbol(bernstein_catalog(1, {0.25, 0.75}), 2);
  CHECK(s1(0.0, xi).real() == doctest::Approx(-2.0).epsilon(1e-15));
  const auto half = subordinate_symbol(bernstein_power(0.5), 2);
  const auto frac = make_fractional_symbol(2, 1.0);
  const std::vector<double> xi2{3.0, 4.0};
  CHECK(half(0.0, xi2).real() == doctest::Approx(frac(0.0, xi2).real()).epsilon(1e-15));

  const auto id = subordinate_symbol(bernstein_power(1.0), 3);
  const auto heat = make_heat_symbol(3);
  for (double a : {0.1, 1.7, 33.0}) {
    const std::vector<double> v{a, -0.3 * a, 0.01};
    CHECK(id(0.0, v) == heat(0.0, v));
    CHECK(id.time_integral(0.2, 0.9, v) == heat.time_integral(0.2, 0.9, v));
    CHECK(id.flow(0.2, 0.9)(v) == heat.flow(0.2, 0.9)(v));
    CHECK(id.half_power(v) == heat.half_power(v));
  }
  CHECK(id.order() == 2.0);
}

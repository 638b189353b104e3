#include <cmath>
#include <numbers>

#include "doctest.h"
#include "leocov/errors.hpp"
#include "leocov/numerics.hpp"

using namespace leocov;
using namespace leocov::numerics;

namespace {

SeriesSpec geometric(double ratio, double tol) {
  SeriesSpec spec;
  spec.tolerance = tol;
  spec.next = [ratio](std::size_t z) {
    const double term = std::pow(ratio, static_cast<double>(z));
    return SeriesTerm{term, term * ratio / (1.0 - ratio)};
  };
  return spec;
}

}  // namespace

TEST_CASE("geometric series sums to its closed form") {
  const SeriesResult r = sum_series(geometric(0.5, 1e-12));
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::fabs(r.value - 2.0) < 1e-12);
  CHECK(r.tail_bound < 1e-12);
  CHECK(r.terms > 30);
}

TEST_CASE("sum of z 0.9^z is 90") {
  // closed form beta / (1 - beta)^2; the tail after z is bounded by
  // (z+1) beta^{z+1} / (1 - beta (z+2)/(z+1)) once the ratio bound is < 1
  const double beta = 0.9;
  const double expected = beta / ((1.0 - beta) * (1.0 - beta));
  SeriesSpec spec;
  spec.tolerance = 1e-9;
  spec.next = [beta](std::size_t z) {
    const double k = static_cast<double>(z);
    const double term = k * std::pow(beta, k);
    const double ratio = beta * (k + 2.0) / (k + 1.0);
    const double next = (k + 1.0) * std::pow(beta, k + 1.0);
    const double tail = ratio < 1.0 ? next / (1.0 - ratio)
                                    : std::numeric_limits<double>::infinity();
    return SeriesTerm{term, tail};
  };
  const SeriesResult r = sum_series(spec);
  CHECK(std::fabs(r.value - expected) < 1e-9);
}

TEST_CASE("series gives up at max_terms") {
  SeriesSpec spec = geometric(0.999, 1e-15);
  spec.max_terms = 10;
  CHECK_THROWS_AS(sum_series(spec), NonConvergence);
  try {
    sum_series(spec);
  } catch (const NonConvergence& e) {
    CHECK(e.terms() == 10);
    CHECK(e.partial_sum() > 9.0);
  }
}

TEST_CASE("series is bit-identical across calls") {
  const double a = sum_series(geometric(0.7, 1e-14)).value;
  const double b = sum_series(geometric(0.7, 1e-14)).value;
  CHECK(a == b);
}

TEST_CASE("series rejects bad specs") {
  SeriesSpec spec = geometric(0.5, 0.0);
  CHECK_THROWS_AS(sum_series(spec), InvalidParameter);
  spec = geometric(0.5, 1e-3);
  spec.max_terms = 0;
  CHECK_THROWS_AS(sum_series(spec), InvalidParameter);
}

TEST_CASE("exponential over the half line") {
  QuadratureSpec spec;
  spec.integrand = [](double x) { return std::exp(-x); };
  spec.lower = 0.0;
  spec.upper = std::numeric_limits<double>::infinity();
  const QuadratureResult r = integrate(spec);
  CHECK(std::fabs(r.value - 1.0) < 1e-8);
}

TEST_CASE("planar nearest-neighbour density integrates to 1") {
  const double lambda = 1e-5;
  QuadratureSpec spec;
  spec.integrand = [=](double r) {
    return 2.0 * std::numbers::pi * lambda * r * std::exp(-std::numbers::pi * lambda * r * r);
  };
  spec.lower = 0.0;
  spec.upper = std::numeric_limits<double>::infinity();
  CHECK(std::fabs(integrate(spec).value - 1.0) < 1e-8);
}

TEST_CASE("endpoint singularities are integrated accurately") {
  // int_0^1 x^{-1/2} = 2 and int_0^1 (1 - x)^{-1/2} = 2
  QuadratureSpec spec;
  spec.lower = 0.0;
  spec.upper = 1.0;
  spec.integrand = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(integrate(spec).value == doctest::Approx(2.0).epsilon(1e-8));
  spec.integrand = [](double x) { return 1.0 / std::sqrt(1.0 - x); };
  CHECK(integrate(spec).value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("breakpoints handle kinks and jumps") {
  QuadratureSpec spec;
  spec.integrand = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
  spec.lower = 0.0;
  spec.upper = 1.0;
  spec.breakpoints = {0.3};
  CHECK(integrate(spec).value == doctest::Approx(0.3 + 3.5).epsilon(1e-12));

  spec.breakpoints = {0.5, 0.1};
  CHECK_THROWS_AS(integrate(spec), InvalidParameter);
}

TEST_CASE("quadrature reports an unmet tolerance with its estimate") {
  QuadratureSpec spec;
  spec.integrand = [](double x) { return std::sin(1.0 / x) / x; };
  spec.lower = 1e-6;
  spec.upper = 1.0;
  spec.max_intervals = 20;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 1e-14;
  spec.endpoint_smoothing = false;
  try {
    integrate(spec);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.estimate()));
    CHECK(e.error_bound() > 0.0);
  }
}

TEST_CASE("quadrature self-consistency") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x) + x * x; };
  QuadratureSpec spec;
  spec.integrand = f;
  spec.lower = 0.0;
  spec.upper = 4.0;

  SUBCASE("halving tolerances moves the result by at most the coarse tolerance") {
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-10;
    const double coarse = integrate(spec).value;
    spec.rel_tol = 0.5e-6;
    spec.abs_tol = 0.5e-10;
    const double fine = integrate(spec).value;
    CHECK(std::fabs(coarse - fine) <= 1e-6 * std::fabs(coarse));
  }
  SUBCASE("splitting the support at an interior point") {
    const double whole = integrate(spec).value;
    for (double cut : {0.37, 1.0, 2.9}) {
      QuadratureSpec left = spec;
      left.upper = cut;
      QuadratureSpec right = spec;
      right.lower = cut;
      const double parts = integrate(left).value + integrate(right).value;
      CHECK(std::fabs(parts - whole) <= 2.0 * spec.rel_tol * std::fabs(whole));
    }
  }
  SUBCASE("deterministic") {
    CHECK(integrate(spec).value == integrate(spec).value);
  }
}

TEST_CASE("empty and reversed supports integrate to zero") {
  QuadratureSpec spec;
  spec.integrand = [](double) { return 1.0; };
  spec.lower = 2.0;
  spec.upper = 1.0;
  CHECK(integrate(spec).value == 0.0);
}

TEST_CASE("bisection") {
  const double root = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12);
  CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, 0.0, 2.0, 1e-6), InvalidParameter);
  CHECK(bisect([](double x) { return x - 1.0; }, 1.0, 3.0, 1e-9) == 1.0);
}

#include "fdpboot/templates.hpp"

#include "fdpboot/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace fdpboot;

TEST_CASE("linear thresholds") {
  const auto fam = TemplateFamily::linear(10, 100);
  CHECK(fam.threshold(5, 0.2) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(fam.threshold(7, 0.0) == 0.0);
  const auto full = TemplateFamily::linear(4, 4);
  CHECK(full.threshold(4, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("linear inverse") {
  const auto fam = TemplateFamily::linear(10, 100);
  CHECK(fam.inverse_threshold(5, 0.01) == doctest::Approx(0.2).epsilon(1e-12));
  // above-range values are returned unclamped; only the min over k is used
  const auto small = TemplateFamily::linear(4, 4);
  CHECK(small.inverse_threshold(2, 0.9) == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("inverse round trip") {
  Rng rng(5);
  const auto fam = TemplateFamily::linear(23, 57);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_index(23));
    const double lambda = rng.uniform01();
    const double round = fam.inverse_threshold(k, fam.threshold(k, lambda));
    CHECK(std::fabs(round - lambda) <= 1e-12);
  }
}

TEST_CASE("linear thresholds increase in k") {
  const auto fam = TemplateFamily::linear(8, 20);
  for (int k = 1; k < 8; ++k) {
    CHECK(fam.threshold(k, 0.4) < fam.threshold(k + 1, 0.4));
  }
}

TEST_CASE("inverse is monotone in p") {
  const auto fam = TemplateFamily::linear(6, 12);
  for (int k = 1; k <= 6; ++k) {
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double inv = fam.inverse_threshold(k, i / 20.0);
      CHECK(inv >= prev);
      prev = inv;
    }
  }
}

TEST_CASE("custom family with explicit inverses") {
  std::vector<TemplateFamily::Fn> fns, invs;
  const int m = 10;
  for (int k = 1; k <= 3; ++k) {
    const double scale = static_cast<double>(k) / m;
    fns.push_back([scale](double x) { return scale * x * x; });
    invs.push_back([scale](double p) { return std::sqrt(p / scale); });
  }
  const auto fam = TemplateFamily::custom(m, fns, invs);
  CHECK(fam.size() == 3);
  CHECK(fam.threshold(2, 0.5) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(fam.inverse_threshold(2, 0.05) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("custom family bisection fallback") {
  std::vector<TemplateFamily::Fn> fns;
  fns.push_back([](double x) { return 0.3 * x * x; });
  const auto fam = TemplateFamily::custom(5, fns);
  for (double lambda : {0.1, 0.33, 0.92}) {
    const double p = fam.threshold(1, lambda);
    CHECK(std::fabs(fam.inverse_threshold(1, p) - lambda) <= 1e-10);
  }
  // beyond t_1(1) = 0.3 the inverse reports the sentinel
  CHECK(std::isinf(fam.inverse_threshold(1, 0.5)));
}

TEST_CASE("custom families are validated on a grid") {
  std::vector<TemplateFamily::Fn> bad_origin{[](double x) { return x + 0.1; }};
  CHECK_THROWS_AS(TemplateFamily::custom(5, bad_origin), std::invalid_argument);
  std::vector<TemplateFamily::Fn> not_increasing{[](double x) { return x * (1.0 - x); }};
  CHECK_THROWS_AS(TemplateFamily::custom(5, not_increasing), std::invalid_argument);
}

TEST_CASE("argument validation") {
  const auto fam = TemplateFamily::linear(4, 8);
  CHECK_THROWS_AS(fam.threshold(0, 0.5), std::out_of_range);
  CHECK_THROWS_AS(fam.threshold(5, 0.5), std::out_of_range);
  CHECK_THROWS_AS(fam.threshold(1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(fam.threshold(1, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(fam.inverse_threshold(1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(TemplateFamily::linear(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(TemplateFamily::linear(6, 5), std::invalid_argument);
}

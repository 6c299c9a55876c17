#include "fdpboot/bounds.hpp"

#include "fdpboot/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace fdpboot;

namespace {

StatField p_field_from(const std::vector<double>& p, int L = 1) {
  StatField field;
  const int m_pts = static_cast<int>(p.size()) / L;
  field.values.resize(L, m_pts);
  for (int l = 0; l < L; ++l) {
    for (int v = 0; v < m_pts; ++v) field.values(l, v) = p[static_cast<std::size_t>(l * m_pts + v)];
  }
  field.dof = 10;
  field.kind = StatKind::PValueTwoSided;
  return field;
}

std::vector<double> random_pvalues(Rng& rng, int m, bool gridded) {
  std::vector<double> p(static_cast<std::size_t>(m));
  for (double& x : p) {
    x = gridded ? std::floor(rng.uniform01() * 20.0) / 20.0 : rng.uniform01();
  }
  return p;
}

}  // namespace

TEST_CASE("hand-worked V-bar") {
  const auto field = p_field_from({0.01, 0.2, 0.6, 0.9});
  const auto fam = TemplateFamily::linear(4, 4);
  const auto set = HypothesisSet::full(4);
  const BoundReport report = vbar(field, set, fam, 0.4);
  CHECK(report.false_positive_bound == 3);
  CHECK(report.set_size == 4);
  CHECK(report.tdp_lower == doctest::Approx(0.25));
  CHECK(report.fdp_upper == doctest::Approx(0.75));
}

TEST_CASE("degenerate p-value fields") {
  const auto fam = TemplateFamily::linear(5, 5);
  const auto zeros = p_field_from({0.0, 0.0, 0.0, 0.0, 0.0});
  const auto ones = p_field_from({1.0, 1.0, 1.0, 1.0, 1.0});
  for (int size = 1; size <= 5; ++size) {
    std::vector<int> ids(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) ids[static_cast<std::size_t>(i)] = i;
    const auto set = HypothesisSet::from_ids(ids, 5);
    CHECK(vbar(zeros, set, fam, 0.5).false_positive_bound == 0);
    CHECK(vbar(ones, set, fam, 0.5).false_positive_bound == size);
  }
}

TEST_CASE("empty subset is trivially bounded") {
  const auto field = p_field_from({0.5, 0.5});
  const auto fam = TemplateFamily::linear(2, 2);
  const BoundReport report = vbar(field, HypothesisSet{}, fam, 0.3);
  CHECK(report.false_positive_bound == 0);
  CHECK(report.set_size == 0);
  CHECK(report.tdp_lower == 0.0);
  CHECK(report.fdp_upper == 0.0);
}

TEST_CASE("fast V-bar equals the quadratic reference") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_index(49));
    const auto p = random_pvalues(rng, m, trial % 2 == 0);
    const auto field = p_field_from(p);
    const int K = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
    const auto fam = TemplateFamily::linear(K, m);
    const double lambda = rng.uniform01();

    std::vector<int> ids;
    for (int id = 0; id < m; ++id) {
      if (rng.uniform01() < 0.7) ids.push_back(id);
    }
    const auto set = HypothesisSet::from_ids(ids, m);
    std::vector<double> subset_p;
    for (int id : set.indices) subset_p.push_back(p[static_cast<std::size_t>(id)]);

    const int expected =
        std::min(oracles::vbar_reference(subset_p, fam, lambda), set.size());
    CHECK(vbar(field, set, fam, lambda).false_positive_bound == expected);
  }
}

TEST_CASE("V-bar with a custom zeta vector") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3 + static_cast<int>(rng.uniform_index(20));
    const auto p = random_pvalues(rng, m, false);
    const auto field = p_field_from(p);
    const int K = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
    const auto fam = TemplateFamily::linear(K, m);
    std::vector<int> zeta(static_cast<std::size_t>(K));
    int z = 0;
    for (int k = 0; k < K; ++k) {
      z += static_cast<int>(rng.uniform_index(3));
      zeta[static_cast<std::size_t>(k)] = z;
    }
    const double lambda = rng.uniform01();
    const auto set = HypothesisSet::full(m);
    const int expected = std::min(oracles::vbar_reference(p, fam, lambda, &zeta), m);
    CHECK(vbar(field, set, fam, lambda, &zeta).false_positive_bound == expected);
  }
  const auto field = p_field_from({0.1, 0.2});
  const auto fam = TemplateFamily::linear(2, 2);
  std::vector<int> decreasing{1, 0};
  CHECK_THROWS_AS(vbar(field, HypothesisSet::full(2), fam, 0.5, &decreasing),
                  std::invalid_argument);
  std::vector<int> negative{-1, 0};
  CHECK_THROWS_AS(vbar(field, HypothesisSet::full(2), fam, 0.5, &negative),
                  std::invalid_argument);
}

TEST_CASE("V-bar is monotone in the subset and in lambda") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 5 + static_cast<int>(rng.uniform_index(30));
    const auto p = random_pvalues(rng, m, false);
    const auto field = p_field_from(p);
    const auto fam = TemplateFamily::linear(m, m);

    std::vector<int> small_ids, big_ids;
    for (int id = 0; id < m; ++id) {
      const double u = rng.uniform01();
      if (u < 0.4) small_ids.push_back(id);
      if (u < 0.8) big_ids.push_back(id);  // superset of small
    }
    const auto small = HypothesisSet::from_ids(small_ids, m);
    const auto big = HypothesisSet::from_ids(big_ids, m);
    const double lambda1 = 0.3 * rng.uniform01();
    const double lambda2 = lambda1 + (1.0 - lambda1) * rng.uniform01();
    CHECK(vbar(field, small, fam, lambda1).false_positive_bound <=
          vbar(field, big, fam, lambda1).false_positive_bound);
    CHECK(vbar(field, big, fam, lambda2).false_positive_bound <=
          vbar(field, big, fam, lambda1).false_positive_bound);
  }
}

TEST_CASE("simes lambda is the identity") {
  CHECK(simes_lambda(0.1) == 0.1);
  CHECK(simes_lambda(0.05) == 0.05);
  CHECK_THROWS_AS(simes_lambda(0.0), std::invalid_argument);
  CHECK_THROWS_AS(simes_lambda(1.0), std::invalid_argument);

  // composed with the hand-worked example at alpha = 0.4
  const auto field = p_field_from({0.01, 0.2, 0.6, 0.9});
  const auto fam = TemplateFamily::linear(4, 4);
  const auto report = vbar(field, HypothesisSet::full(4), fam, simes_lambda(0.4));
  CHECK(report.false_positive_bound == 3);
}

TEST_CASE("hommel factor hand examples") {
  CHECK(hommel_factor({0.01, 0.02, 0.8}, 0.05) == 1);
  CHECK(hommel_factor({1.0, 1.0, 1.0, 1.0}, 0.1) == 4);
  CHECK(hommel_factor({0.0, 0.0, 0.0}, 0.1) == 0);
}

TEST_CASE("hommel factor equals the brute-force definition") {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_index(100));
    auto p = random_pvalues(rng, m, trial % 3 == 0);
    const double alpha = 0.01 + 0.5 * rng.uniform01();
    CHECK(hommel_factor(p, alpha) == oracles::hommel_reference(p, alpha));
  }
}

TEST_CASE("ARI lambda") {
  // m = 3, h = 1 at alpha = 0.05 continues the hommel example
  CHECK(ari_lambda({0.01, 0.02, 0.8}, 0.05) == doctest::Approx(0.15).epsilon(1e-12));
  // h = m degenerates to Simes
  CHECK(ari_lambda({1.0, 1.0, 1.0}, 0.05) == doctest::Approx(0.05).epsilon(1e-12));
  // h = 0 clamps to 1
  CHECK(ari_lambda({0.0, 0.0, 0.0}, 0.05) == 1.0);
}

TEST_CASE("ARI dominates Simes") {
  Rng rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(rng.uniform_index(40));
    auto p = random_pvalues(rng, m, false);
    // sprinkle some small p-values so h < m now and then
    for (int i = 0; i < m / 4; ++i) p[static_cast<std::size_t>(i)] *= 0.01;
    const auto field = p_field_from(p);
    const double alpha = 0.05 + 0.2 * rng.uniform01();
    const double bar_alpha = ari_lambda(p, alpha);
    CHECK(bar_alpha >= alpha);
    const auto fam = TemplateFamily::linear(m, m);
    std::vector<int> ids;
    for (int id = 0; id < m; ++id) {
      if (rng.uniform01() < 0.6) ids.push_back(id);
    }
    const auto set = HypothesisSet::from_ids(ids, m);
    CHECK(vbar(field, set, fam, bar_alpha).false_positive_bound <=
          vbar(field, set, fam, alpha).false_positive_bound);
  }
}

TEST_CASE("BH rejection set") {
  const auto field = p_field_from({0.01, 0.04, 0.5});
  const auto set = bh_rejection_set(field, 0.05);
  CHECK(set.indices == std::vector<int>{0});

  CHECK(bh_rejection_set(p_field_from({1.0, 1.0, 1.0}), 0.05).empty());
  CHECK(bh_rejection_set(p_field_from({0.0, 0.0, 0.0}), 0.05).size() == 3);
}

TEST_CASE("BH ties break by hypothesis id") {
  const auto field = p_field_from({0.5, 0.01, 0.01, 0.9});
  const auto set = bh_rejection_set(field, 0.05);
  CHECK(set.indices == std::vector<int>{1, 2});
}

TEST_CASE("top-k curves match per-k V-bar") {
  Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 4 + static_cast<int>(rng.uniform_index(36));
    const auto p = random_pvalues(rng, m, trial % 2 == 0);
    const auto field = p_field_from(p);
    const int K = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
    const auto fam = TemplateFamily::linear(K, m);
    const double lambda = rng.uniform01();
    const auto curve = topk_curves(field, fam, lambda, m);
    REQUIRE(static_cast<int>(curve.size()) == m);

    // H_k: k smallest p-values with ties by id
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return p[static_cast<std::size_t>(a)] < p[static_cast<std::size_t>(b)] ||
             (p[static_cast<std::size_t>(a)] == p[static_cast<std::size_t>(b)] && a < b);
    });
    int prev_tp = 0;
    for (int k = 1; k <= m; ++k) {
      std::vector<double> subset_p;
      for (int i = 0; i < k; ++i) subset_p.push_back(p[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
      const int expected = std::min(oracles::vbar_reference(subset_p, fam, lambda), k);
      const auto& pt = curve[static_cast<std::size_t>(k - 1)];
      CHECK(pt.v_bar == expected);
      CHECK(pt.tp_lower == k - expected);
      CHECK(pt.tp_lower >= prev_tp);  // adding hypotheses never lowers the count bound
      prev_tp = pt.tp_lower;
    }

    // the full curve endpoint reproduces vbar over everything
    const auto full_report = vbar(field, HypothesisSet::full(m), fam, lambda);
    CHECK(curve.back().v_bar == full_report.false_positive_bound);
  }
}

TEST_CASE("top-k with a zero smallest p-value") {
  const auto field = p_field_from({0.4, 0.0, 0.7});
  const auto fam = TemplateFamily::linear(3, 3);
  const auto curve = topk_curves(field, fam, 0.5, 1);
  CHECK(curve[0].v_bar == 0);
  CHECK(curve[0].tp_lower == 1);
}

TEST_CASE("hypothesis set validation") {
  CHECK_THROWS_AS(HypothesisSet::from_ids({0, 5}, 5), std::invalid_argument);
  CHECK_THROWS_AS(HypothesisSet::from_ids({-1}, 5), std::invalid_argument);
  const auto set = HypothesisSet::from_ids({3, 1, 1, 2}, 5);
  CHECK(set.indices == std::vector<int>{1, 2, 3});
}

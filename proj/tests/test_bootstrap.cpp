#include "fdpboot/bootstrap.hpp"

#include "fdpboot/rng.hpp"
#include "fdpboot/scenario.hpp"
#include "fdpboot/student.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace fdpboot;

namespace {

Dataset small_dataset(std::uint64_t seed, int n = 12, int m_pts = 6) {
  Rng rng(seed);
  Dataset ds;
  ds.design.resize(n, 2);
  ds.response.resize(n, m_pts);
  for (int i = 0; i < n; ++i) {
    ds.design(i, 0) = 1.0;
    ds.design(i, 1) = rng.normal();
    for (int v = 0; v < m_pts; ++v) ds.response(i, v) = rng.normal();
  }
  ds.contrasts.resize(1, 2);
  ds.contrasts << 0.0, 1.0;
  return ds;
}

StatField p_field_from(const std::vector<double>& p) {
  StatField field;
  field.values.resize(1, static_cast<int>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) field.values(0, static_cast<int>(i)) = p[i];
  field.dof = 10;
  field.kind = StatKind::PValueTwoSided;
  return field;
}

}  // namespace

TEST_CASE("quantile order index realizes the empirical inf") {
  CHECK(quantile_order_index(0.1, 100) == 10);
  CHECK(quantile_order_index(0.1, 10) == 1);
  CHECK(quantile_order_index(0.05, 100) == 5);
  CHECK(quantile_order_index(0.101, 100) == 11);
  CHECK(quantile_order_index(0.9, 1) == 1);
  CHECK(quantile_order_index(0.999, 3) == 3);
}

TEST_CASE("bootstrap is deterministic across runs and thread counts") {
  const Dataset ds = small_dataset(101);
  const ModelFit f = fit(ds);
  const auto a = draw_bootstrap(f, ds, 3, 77, Sidedness::TwoSided, 1);
  const auto b = draw_bootstrap(f, ds, 3, 77, Sidedness::TwoSided, 1);
  const auto c = draw_bootstrap(f, ds, 3, 77, Sidedness::TwoSided, 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.stat_fields[i].cwiseEqual(b.stat_fields[i]).all());
    CHECK(a.stat_fields[i].cwiseEqual(c.stat_fields[i]).all());
  }
  const auto d = draw_bootstrap(f, ds, 3, 78);
  CHECK_FALSE(a.stat_fields[0].cwiseEqual(d.stat_fields[0]).all());
}

TEST_CASE("noiseless fit bootstraps to all-zero fields") {
  // zero response keeps the residuals exactly zero, so every replicate hits
  // the 0/0 convention
  Dataset ds = small_dataset(103);
  ds.response.setZero();
  const ModelFit f = fit(ds);
  CHECK(f.residuals.cwiseAbs().maxCoeff() == 0.0);
  const auto sample = draw_bootstrap(f, ds, 5, 1);
  for (const Matrix& field : sample.stat_fields) {
    CHECK(field.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("draw_bootstrap validates its arguments") {
  const Dataset ds = small_dataset(105);
  const ModelFit f = fit(ds);
  CHECK_THROWS_AS(draw_bootstrap(f, ds, 0, 1), std::invalid_argument);
}

TEST_CASE("f of a single hypothesis") {
  // choose t so the two-sided Cauchy p-value is exactly 0.3
  const double t = std::tan(0.35 * 3.14159265358979323846);
  StatField field;
  field.values.resize(1, 10);
  field.values.setZero();
  field.values(0, 4) = t;
  field.dof = 1;
  field.kind = StatKind::TStatistic;
  const auto fam = TemplateFamily::linear(10, 10);
  const auto subset = HypothesisSet::from_ids({4}, 10);
  CHECK(f_statistic(field, subset, fam) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("f of all-zero p-values and of the empty set") {
  const auto fam = TemplateFamily::linear(4, 4);
  const auto zeros = p_field_from({0.0, 0.0, 0.0, 0.0});
  CHECK(f_statistic(zeros, HypothesisSet::full(4), fam) == 0.0);
  CHECK(std::isinf(f_statistic(zeros, HypothesisSet{}, fam)));
}

TEST_CASE("f matches the brute-force oracle") {
  Rng rng(67);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_index(30));
    std::vector<double> p(static_cast<std::size_t>(m));
    for (double& x : p) x = rng.uniform01();
    const auto field = p_field_from(p);
    const int K = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
    const auto fam = TemplateFamily::linear(K, m);
    std::vector<int> ids;
    for (int id = 0; id < m; ++id) {
      if (rng.uniform01() < 0.6) ids.push_back(id);
    }
    if (ids.empty()) ids.push_back(0);
    const auto subset = HypothesisSet::from_ids(ids, m);
    std::vector<double> subset_p;
    for (int id : subset.indices) subset_p.push_back(p[static_cast<std::size_t>(id)]);
    CHECK(f_statistic(field, subset, fam) ==
          doctest::Approx(oracles::f_reference(subset_p, fam)).epsilon(1e-14));
  }
}

TEST_CASE("subset monotonicity of f") {
  Rng rng(71);
  const Dataset ds = small_dataset(107, 14, 8);
  const ModelFit f = fit(ds);
  const auto sample = draw_bootstrap(f, ds, 20, 5);
  const auto fam = TemplateFamily::linear(8, 8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> inner_ids, outer_ids;
    for (int id = 0; id < 8; ++id) {
      const double u = rng.uniform01();
      if (u < 0.4) inner_ids.push_back(id);
      if (u < 0.8) outer_ids.push_back(id);
    }
    if (inner_ids.empty()) inner_ids.push_back(0);
    if (outer_ids.empty()) outer_ids = inner_ids;
    const auto inner = HypothesisSet::from_ids(inner_ids, 8);
    const auto outer = HypothesisSet::from_ids(outer_ids, 8);
    for (const Matrix& field_values : sample.stat_fields) {
      StatField sf;
      sf.values = field_values;
      sf.dof = sample.dof;
      sf.kind = StatKind::TStatistic;
      CHECK(f_statistic(sf, inner, fam) >= f_statistic(sf, outer, fam));
    }
  }
}

TEST_CASE("single-step calibration order statistics") {
  const Dataset ds = small_dataset(109);
  const ModelFit f = fit(ds);
  const auto fam = TemplateFamily::linear(6, 6);
  const auto full = HypothesisSet::full(6);

  const auto one = draw_bootstrap(f, ds, 1, 9);
  const auto res_one = calibrate_single_step(one, full, fam, 0.5);
  StatField sf;
  sf.values = one.stat_fields[0];
  sf.dof = one.dof;
  sf.kind = StatKind::TStatistic;
  CHECK(res_one.lambda_star == f_statistic(sf, full, fam));

  const auto ten = draw_bootstrap(f, ds, 10, 9);
  const auto res_ten = calibrate_single_step(ten, full, fam, 0.1);
  std::vector<double> fs = res_ten.f_samples;
  std::sort(fs.begin(), fs.end());
  CHECK(res_ten.lambda_star == fs.front());
  CHECK(static_cast<int>(res_ten.f_samples.size()) == 10);
}

TEST_CASE("quantile correctness on the empirical CDF") {
  Rng rng(73);
  const Dataset ds = small_dataset(111);
  const ModelFit f = fit(ds);
  const auto fam = TemplateFamily::linear(6, 6);
  const auto full = HypothesisSet::full(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int B = 1 + static_cast<int>(rng.uniform_index(60));
    const double alpha = 0.05 + 0.9 * rng.uniform01();
    const auto sample = draw_bootstrap(f, ds, B, 1000 + trial);
    const auto res = calibrate_single_step(sample, full, fam, alpha);
    int below = 0, strictly_below = 0;
    for (double x : res.f_samples) {
      if (x <= res.lambda_star) ++below;
      if (x < res.lambda_star) ++strictly_below;
    }
    CHECK(static_cast<double>(below) / B >= alpha);
    CHECK(static_cast<double>(strictly_below) / B < alpha);
  }
}

TEST_CASE("degenerate f distribution") {
  // all f samples equal -> lambda* equals that value for every alpha
  Dataset ds = small_dataset(113);
  ds.response.setZero();  // exact noiseless fit: every T^b field is zero
  const ModelFit f = fit(ds);
  const auto sample = draw_bootstrap(f, ds, 8, 3);
  const auto fam = TemplateFamily::linear(6, 6);
  const auto full = HypothesisSet::full(6);
  for (double alpha : {0.05, 0.5, 0.95}) {
    const auto res = calibrate_single_step(sample, full, fam, alpha);
    // zero t -> p = 1 -> f = min_k m/k = 1 at k = m
    CHECK(res.lambda_star == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("step-down fixed point equals single step") {
  // strong smoothing-free noise, template over a tiny instance: if nothing
  // falls below t_1(lambda*), one iteration suffices
  const Dataset ds = small_dataset(115, 16, 4);
  const ModelFit f = fit(ds);
  const auto sample = draw_bootstrap(f, ds, 50, 21);
  const auto fam = TemplateFamily::linear(4, 4);
  const StatField p = p_values(t_statistics(f, ds), Sidedness::TwoSided);
  const auto sd = calibrate_step_down(sample, p, fam, 0.1);
  const auto ss = calibrate_single_step(sample, HypothesisSet::full(4), fam, 0.1);
  const double cut = fam.threshold(1, std::min(1.0, ss.lambda_star));
  bool any_below = false;
  for (int id = 0; id < 4; ++id) any_below |= p.at_id(id) < cut;
  if (!any_below) {
    CHECK(sd.iterations == 1);
    CHECK(sd.lambda_star == ss.lambda_star);
    REQUIRE(sd.surviving_set.has_value());
    CHECK(sd.surviving_set->size() == 4);
  }
  CHECK(sd.lambda_star >= ss.lambda_star);
}

TEST_CASE("step-down shrinks monotonically and dominates single step") {
  // simulated instance with signal so the step-down actually removes ids
  ScenarioConfig config;
  config.grf = {5, 5, 0.0, 1, 0};
  config.n_subjects = 40;
  config.pi0 = 0.6;
  const Scenario scenario = build_scenario(config, 424242);
  const ModelFit f = fit(scenario.dataset);
  const StatField p = p_values(t_statistics(f, scenario.dataset), Sidedness::TwoSided);
  const int m = scenario.dataset.n_hypotheses();
  const auto fam = TemplateFamily::linear(m, m);
  const auto sample = draw_bootstrap(f, scenario.dataset, 60, 7);

  const auto ss = calibrate_single_step(sample, HypothesisSet::full(m), fam, 0.1);
  const auto sd = calibrate_step_down(sample, p, fam, 0.1);
  CHECK(sd.lambda_star >= ss.lambda_star);
  REQUIRE(sd.surviving_set.has_value());
  CHECK(sd.surviving_set->size() <= m);

  // replaying the iteration shows nested survivor sets and nondecreasing lambda
  HypothesisSet current = HypothesisSet::full(m);
  double prev_lambda = -1.0;
  for (int iter = 0; iter < sd.iterations; ++iter) {
    const auto step = calibrate_single_step(sample, current, fam, 0.1);
    CHECK(step.lambda_star >= prev_lambda);
    prev_lambda = step.lambda_star;
    std::vector<int> survivors;
    const double cut = fam.threshold(1, std::min(1.0, step.lambda_star));
    for (int id = 0; id < m; ++id) {
      if (p.at_id(id) >= cut) survivors.push_back(id);
    }
    const auto next = HypothesisSet::from_ids(survivors, m);
    CHECK(std::includes(current.indices.begin(), current.indices.end(),
                        next.indices.begin(), next.indices.end()));
    current = next;
  }
  CHECK(current.indices == sd.surviving_set->indices);

  // dominance: step-down V-bar never exceeds the single-step V-bar
  Rng rng(79);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<int> ids;
    for (int id = 0; id < m; ++id) {
      if (rng.uniform01() < 0.3) ids.push_back(id);
    }
    if (ids.empty()) ids.push_back(0);
    const auto query = HypothesisSet::from_ids(ids, m);
    const auto v_sd = vbar(p, query, fam, std::min(1.0, sd.lambda_star));
    const auto v_ss = vbar(p, query, fam, std::min(1.0, ss.lambda_star));
    CHECK(v_sd.false_positive_bound <= v_ss.false_positive_bound);
  }
}

TEST_CASE("one-sided p-values flow through f and calibration") {
  const double t = std::tan(0.2 * 3.14159265358979323846);  // Phi_1(t) = 0.7
  StatField field;
  field.values.resize(1, 5);
  field.values.setConstant(-100.0);  // one-sided p ~ 1 elsewhere
  field.values(0, 2) = t;
  field.dof = 1;
  field.kind = StatKind::TStatistic;
  const auto fam = TemplateFamily::linear(1, 5);
  const auto subset = HypothesisSet::from_ids({2}, 5);
  // one-sided: p = 1 - Phi_1(t) = 0.3, f = t_1^{-1}(0.3) = 0.3 * 5
  CHECK(f_statistic(field, subset, fam, Sidedness::OneSided) ==
        doctest::Approx(1.5).epsilon(1e-12));
  // two-sided p of the same t is 0.6
  CHECK(f_statistic(field, subset, fam, Sidedness::TwoSided) ==
        doctest::Approx(3.0).epsilon(1e-12));

  const Dataset ds = small_dataset(123, 14, 5);
  const ModelFit f = fit(ds);
  const auto one_sided = draw_bootstrap(f, ds, 30, 9, Sidedness::OneSided);
  const auto two_sided = draw_bootstrap(f, ds, 30, 9, Sidedness::TwoSided);
  // same replicate t fields, different p mapping during calibration
  CHECK(one_sided.stat_fields[0].cwiseEqual(two_sided.stat_fields[0]).all());
  const auto fam5 = TemplateFamily::linear(5, 5);
  const auto full = HypothesisSet::full(5);
  const auto res1 = calibrate_single_step(one_sided, full, fam5, 0.1);
  const auto res2 = calibrate_single_step(two_sided, full, fam5, 0.1);
  CHECK(res1.lambda_star != res2.lambda_star);
  StatField sf;
  sf.values = one_sided.stat_fields[0];
  sf.dof = one_sided.dof;
  sf.kind = StatKind::TStatistic;
  CHECK(res1.f_samples[0] == f_statistic(sf, full, fam5, Sidedness::OneSided));
}

TEST_CASE("bootstrap fields are centered") {
  const Dataset ds = small_dataset(117, 10, 4);
  const ModelFit f = fit(ds);
  const int B = 2000;
  const auto sample = draw_bootstrap(f, ds, B, 55, Sidedness::TwoSided, 4);
  for (int v = 0; v < 4; ++v) {
    double sum = 0.0, sum_sq = 0.0;
    for (const Matrix& field : sample.stat_fields) {
      sum += field(0, v);
      sum_sq += field(0, v) * field(0, v);
    }
    const double mean = sum / B;
    const double var = (sum_sq - B * mean * mean) / (B - 1);
    const double se = std::sqrt(var / B);
    CHECK(std::fabs(mean) <= 3.0 * se);
  }
}

TEST_CASE("fwer threshold basics") {
  const Dataset ds = small_dataset(119, 14, 5);
  const ModelFit f = fit(ds);

  const auto one = draw_bootstrap(f, ds, 1, 31);
  const auto res = fwer_threshold(one, 0.2);
  double min_p = 1.0;
  for (int v = 0; v < 5; ++v) {
    min_p = std::min(min_p, student_p_two_sided(one.stat_fields[0](0, v), one.dof));
  }
  CHECK(res.lambda_star == doctest::Approx(min_p).epsilon(1e-14));

  // K = 1 identity template: f = p_(1), so both calibrations agree
  const auto sample = draw_bootstrap(f, ds, 40, 33);
  const auto minp = fwer_threshold(sample, 0.1);
  const auto identity = TemplateFamily::linear(1, 1);
  const auto single = calibrate_single_step(sample, HypothesisSet::full(5), identity, 0.1);
  CHECK(minp.lambda_star == doctest::Approx(single.lambda_star).epsilon(1e-12));

  // every bootstrap p-value is 1 (zero fields) -> lambda' = 1
  Dataset flat = small_dataset(121, 14, 5);
  flat.response.setZero();
  const ModelFit flat_fit = fit(flat);
  const auto degenerate = draw_bootstrap(flat_fit, flat, 6, 1);
  CHECK(fwer_threshold(degenerate, 0.3).lambda_star == 1.0);
}

TEST_CASE("fwer rejections at a degenerate threshold") {
  const auto field = p_field_from({1.0, 1.0, 1.0});
  const auto set = fwer_rejections(field, 1.0);
  CHECK(set.size() == 3);
  const auto none = fwer_rejections(field, 0.5);
  CHECK(none.empty());
}

#include "fdpboot/simulate.hpp"

#include "fdpboot/csv.hpp"
#include "fdpboot/parallel.hpp"
#include "fdpboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdpboot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int count_nonnull(const HypothesisSet& set, const std::vector<char>& is_null) {
  int count = 0;
  for (int id : set.indices) count += is_null[static_cast<std::size_t>(id)] ? 0 : 1;
  return count;
}

}  // namespace

std::string power_set_tag(PowerSet set) {
  switch (set) {
    case PowerSet::Full: return "full";
    case PowerSet::Bh: return "bh";
    case PowerSet::P05: return "p05";
  }
  return "unknown";
}

SimReport run_simulation(const ScenarioConfig& config, int threads) {
  if (config.reps < 1) throw std::invalid_argument("simulate: reps must be >= 1");
  if (config.methods.empty()) throw std::invalid_argument("simulate: no methods requested");
  const int V = config.grf.rows * config.grf.cols;
  const int m = 2 * V;
  const int K = config.template_size > 0 ? std::min(config.template_size, m) : m;
  const auto family = TemplateFamily::linear(K, m);
  const bool needs_bootstrap =
      std::any_of(config.methods.begin(), config.methods.end(), [](CalibrationMethod mth) {
        return mth == CalibrationMethod::SingleStep || mth == CalibrationMethod::StepDown;
      });

  const int n_methods = static_cast<int>(config.methods.size());
  SimReport report;
  report.config = config;
  report.records.resize(static_cast<std::size_t>(config.reps) * n_methods);

  parallel_for(config.reps, threads, [&](int rep) {
    const std::uint64_t rep_seed = child_seed(config.seed, static_cast<std::uint64_t>(rep));
    const Scenario scenario = build_scenario(config, rep_seed);
    const ModelFit fitted = fit(scenario.dataset);
    const StatField t_field = t_statistics(fitted, scenario.dataset);
    const StatField p_field = p_values(t_field, config.sidedness);

    std::vector<char> is_null(static_cast<std::size_t>(m), 0);
    for (int id : scenario.true_nulls.indices) is_null[static_cast<std::size_t>(id)] = 1;

    const double f_null = f_statistic(p_field, scenario.true_nulls, family);

    const HypothesisSet full_set = HypothesisSet::full(m);
    const HypothesisSet bh_set = bh_rejection_set(p_field, config.bh_q);
    std::vector<int> p05_ids;
    for (int id = 0; id < m; ++id) {
      if (p_field.at_id(id) <= 0.05) p05_ids.push_back(id);
    }
    const HypothesisSet p05_set = HypothesisSet::from_ids(std::move(p05_ids), m, "p05");

    BootstrapSample sample;
    if (needs_bootstrap) {
      sample = draw_bootstrap(fitted, scenario.dataset, config.bootstraps,
                              child_seed(rep_seed, 3), config.sidedness);
    }

    for (int mi = 0; mi < n_methods; ++mi) {
      const CalibrationMethod method = config.methods[static_cast<std::size_t>(mi)];
      double lambda = 0.0;
      switch (method) {
        case CalibrationMethod::Simes:
          lambda = simes_lambda(config.alpha);
          break;
        case CalibrationMethod::Ari:
          lambda = ari_lambda(p_field, config.alpha);
          break;
        case CalibrationMethod::SingleStep:
          lambda = calibrate_single_step(sample, full_set, family, config.alpha).lambda_star;
          break;
        case CalibrationMethod::StepDown:
          lambda = calibrate_step_down(sample, p_field, family, config.alpha).lambda_star;
          break;
        case CalibrationMethod::FwerMinP:
          throw std::invalid_argument("simulate: fwer is not a JER calibration method");
      }

      RepRecord rec;
      rec.method = method;
      rec.rep = rep;
      rec.lambda = lambda;
      rec.violated = f_null <= lambda;

      const double lambda_bound = std::clamp(lambda, 0.0, 1.0);
      auto power_ratio = [&](const HypothesisSet& r_set, int* out_size, int* out_tp) {
        const BoundReport bound = vbar(p_field, r_set, family, lambda_bound);
        if (out_size) *out_size = r_set.size();
        if (out_tp) *out_tp = r_set.size() - bound.false_positive_bound;
        const int denom = count_nonnull(r_set, is_null);
        if (denom == 0) return kNaN;
        return static_cast<double>(r_set.size() - bound.false_positive_bound) /
               static_cast<double>(denom);
      };
      rec.power_full = power_ratio(full_set, nullptr, nullptr);
      rec.power_bh = power_ratio(bh_set, &rec.bh_size, &rec.bh_tp_lower);
      rec.power_p05 = power_ratio(p05_set, nullptr, nullptr);

      report.records[static_cast<std::size_t>(rep) * n_methods + mi] = rec;
    }
  });

  for (int mi = 0; mi < n_methods; ++mi) {
    const CalibrationMethod method = config.methods[static_cast<std::size_t>(mi)];
    MethodSummary summary;
    summary.reps_used = config.reps;
    int violations = 0;
    double sums[3] = {0.0, 0.0, 0.0};
    double sums_sq[3] = {0.0, 0.0, 0.0};
    int counts[3] = {0, 0, 0};
    for (int rep = 0; rep < config.reps; ++rep) {
      const RepRecord& rec = report.records[static_cast<std::size_t>(rep) * n_methods + mi];
      violations += rec.violated ? 1 : 0;
      const double powers[3] = {rec.power_full, rec.power_bh, rec.power_p05};
      for (int s = 0; s < 3; ++s) {
        if (!std::isnan(powers[s])) {
          sums[s] += powers[s];
          sums_sq[s] += powers[s] * powers[s];
          ++counts[s];
        }
      }
    }
    summary.empirical_jer = static_cast<double>(violations) / config.reps;
    summary.jer_se = std::sqrt(summary.empirical_jer * (1.0 - summary.empirical_jer) /
                               config.reps);
    const PowerSet sets[3] = {PowerSet::Full, PowerSet::Bh, PowerSet::P05};
    for (int s = 0; s < 3; ++s) {
      const std::string tag = power_set_tag(sets[s]);
      const int c = counts[s];
      summary.power[tag] = c > 0 ? sums[s] / c : kNaN;
      if (c > 1) {
        const double mean = sums[s] / c;
        const double var = (sums_sq[s] - c * mean * mean) / (c - 1);
        summary.power_se[tag] = std::sqrt(std::max(var, 0.0) / c);
      } else {
        summary.power_se[tag] = kNaN;
      }
      summary.power_reps[tag] = c;
    }
    report.methods[method] = summary;
  }
  return report;
}

double empirical_jer(const ScenarioConfig& config, CalibrationMethod method, int threads) {
  ScenarioConfig cfg = config;
  cfg.methods = {method};
  return run_simulation(cfg, threads).methods.at(method).empirical_jer;
}

double power(const ScenarioConfig& config, CalibrationMethod method, PowerSet r_choice,
             int threads) {
  ScenarioConfig cfg = config;
  cfg.methods = {method};
  return run_simulation(cfg, threads).methods.at(method).power.at(power_set_tag(r_choice));
}

void write_records_csv(std::ostream& os, const SimReport& report) {
  os << "method,rep,violated,lambda,power_full,power_bh,power_p05\n";
  for (const RepRecord& rec : report.records) {
    os << method_tag(rec.method) << ',' << rec.rep << ',' << (rec.violated ? 1 : 0) << ','
       << format_double(rec.lambda) << ',' << format_double(rec.power_full) << ','
       << format_double(rec.power_bh) << ',' << format_double(rec.power_p05) << '\n';
  }
}

}  // namespace fdpboot

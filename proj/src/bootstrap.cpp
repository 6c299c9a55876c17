#include "fdpboot/bootstrap.hpp"

#include "fdpboot/parallel.hpp"
#include "fdpboot/rng.hpp"
#include "fdpboot/student.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdpboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double p_from_t(double t, int dof, Sidedness sidedness) {
  return sidedness == Sidedness::TwoSided ? student_p_two_sided(t, dof)
                                          : student_p_one_sided(t, dof);
}

// f over a raw t/p matrix; p_form tells whether entries are already p-values.
double f_from_matrix(const Matrix& values, bool p_form, int dof, Sidedness sidedness,
                     const HypothesisSet& subset, const TemplateFamily& family) {
  if (subset.empty()) return kInf;
  const int m_pts = static_cast<int>(values.cols());
  std::vector<double> p;
  p.reserve(subset.indices.size());
  for (int id : subset.indices) {
    const double x = values(id / m_pts, id % m_pts);
    p.push_back(p_form ? x : p_from_t(x, dof, sidedness));
  }
  const int k_top = std::min<int>(family.size(), static_cast<int>(p.size()));
  std::partial_sort(p.begin(), p.begin() + k_top, p.end());
  double f = kInf;
  for (int k = 1; k <= k_top; ++k) {
    f = std::min(f, family.inverse_threshold(k, p[static_cast<std::size_t>(k - 1)]));
  }
  return f;
}

double order_statistic(std::vector<double> values, int k) {
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
  return values[static_cast<std::size_t>(k - 1)];
}

std::vector<double> f_over_sample(const BootstrapSample& sample, const HypothesisSet& subset,
                                  const TemplateFamily& family, int threads) {
  std::vector<double> fs(static_cast<std::size_t>(sample.B));
  parallel_for(sample.B, threads, [&](int b) {
    fs[static_cast<std::size_t>(b)] = f_from_matrix(
        sample.stat_fields[static_cast<std::size_t>(b)], false, sample.dof,
        sample.sidedness, subset, family);
  });
  return fs;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("calibration: alpha must lie in (0, 1)");
  }
}

}  // namespace

std::string method_tag(CalibrationMethod method) {
  switch (method) {
    case CalibrationMethod::SingleStep: return "bootstrap";
    case CalibrationMethod::StepDown: return "bootstrap-stepdown";
    case CalibrationMethod::Simes: return "simes";
    case CalibrationMethod::Ari: return "ari";
    case CalibrationMethod::FwerMinP: return "fwer";
  }
  return "unknown";
}

int quantile_order_index(double alpha, int B) {
  int k = static_cast<int>(std::ceil(alpha * static_cast<double>(B)));
  while (k > 1 && static_cast<double>(k - 1) / static_cast<double>(B) >= alpha) --k;
  if (k < 1) k = 1;
  if (k > B) k = B;
  return k;
}

BootstrapSample draw_bootstrap(const ModelFit& fit, const Dataset& data, int B,
                               std::uint64_t seed, Sidedness sidedness, int threads) {
  if (B < 1) throw std::invalid_argument("draw_bootstrap: B must be >= 1");
  validate(data);
  const int n = data.n_subjects();
  const int L = data.n_contrasts();
  const int m_pts = data.n_points();
  const int dof = fit.dof(n);
  if (dof < 1) throw std::invalid_argument("draw_bootstrap: no residual degrees of freedom");

  // Everything that does not depend on the resample is hoisted out: the
  // design factorization is fixed across replicates.
  const Matrix pinv_design = fit.gram_inverse * data.design.transpose();  // p x n
  Vector denom_scale(L);
  for (int l = 0; l < L; ++l) {
    const double q = data.contrasts.row(l) * fit.gram_inverse * data.contrasts.row(l).transpose();
    denom_scale(l) = q > 0.0 ? std::sqrt(q) : 0.0;
  }

  BootstrapSample sample;
  sample.stat_fields.resize(static_cast<std::size_t>(B));
  sample.seed = seed;
  sample.B = B;
  sample.dof = dof;
  sample.sidedness = sidedness;

  parallel_for(B, threads, [&](int b) {
    Rng rng(child_seed(seed, static_cast<std::uint64_t>(b)));
    Matrix boot_resid(n, m_pts);
    for (int i = 0; i < n; ++i) {
      const auto pick = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      boot_resid.row(i) = fit.residuals.row(pick);
    }
    const Matrix shift = pinv_design * boot_resid;          // beta^b - beta, p x m_pts
    const Matrix numer = data.contrasts * shift;            // L x m_pts
    const Matrix resid = boot_resid - data.design * shift;  // refit residuals
    Matrix field(L, m_pts);
    for (int v = 0; v < m_pts; ++v) {
      const double s = std::sqrt(resid.col(v).squaredNorm() / static_cast<double>(dof));
      for (int l = 0; l < L; ++l) {
        const double num = numer(l, v);
        const double den = s * denom_scale(l);
        if (den > 0.0) {
          field(l, v) = num / den;
        } else {
          field(l, v) = num == 0.0 ? 0.0 : (num > 0 ? kInf : -kInf);
        }
      }
    }
    sample.stat_fields[static_cast<std::size_t>(b)] = std::move(field);
  });
  return sample;
}

double f_statistic(const StatField& field, const HypothesisSet& subset,
                   const TemplateFamily& family, Sidedness sidedness) {
  const bool p_form = field.kind != StatKind::TStatistic;
  if (!p_form && field.dof < 1) {
    throw std::invalid_argument("f_statistic: t field needs dof >= 1");
  }
  return f_from_matrix(field.values, p_form, field.dof, sidedness, subset, family);
}

CalibrationResult calibrate_single_step(const BootstrapSample& sample,
                                        const HypothesisSet& subset,
                                        const TemplateFamily& family, double alpha,
                                        int threads) {
  check_alpha(alpha);
  if (sample.B < 1) throw std::invalid_argument("calibrate: empty bootstrap sample");
  CalibrationResult result;
  result.alpha = alpha;
  result.B = sample.B;
  result.method = CalibrationMethod::SingleStep;
  result.f_samples = f_over_sample(sample, subset, family, threads);
  result.lambda_star = order_statistic(result.f_samples, quantile_order_index(alpha, sample.B));
  return result;
}

CalibrationResult calibrate_step_down(const BootstrapSample& sample,
                                      const StatField& observed_p_values,
                                      const TemplateFamily& family, double alpha,
                                      int max_iterations, int threads) {
  check_alpha(alpha);
  if (max_iterations < 1) throw std::invalid_argument("calibrate: max_iterations must be >= 1");
  if (observed_p_values.kind == StatKind::TStatistic) {
    throw std::invalid_argument("calibrate_step_down: observed field must hold p-values");
  }
  const int m = observed_p_values.n_hypotheses();

  HypothesisSet current = HypothesisSet::full(m);
  CalibrationResult result;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    result = calibrate_single_step(sample, current, family, alpha, threads);
    result.method = CalibrationMethod::StepDown;
    result.iterations = iter;

    // Survivors of the k = 1 (FWER) threshold. lambda* can exceed the
    // template domain when K < |H|; clamping keeps the update conservative.
    const double lambda_clamped = std::clamp(result.lambda_star, 0.0, 1.0);
    const double cut = family.threshold(1, lambda_clamped);
    std::vector<int> survivors;
    survivors.reserve(static_cast<std::size_t>(m));
    for (int id = 0; id < m; ++id) {
      if (observed_p_values.at_id(id) >= cut) survivors.push_back(id);
    }
    if (survivors.empty()) {
      // Unspecified corner: keep the last nonempty iterate and flag it.
      result.surviving_set = current;
      result.surviving_set_emptied = true;
      return result;
    }
    // lambda_j is nondecreasing over iterations, so the survivor sets are
    // nested threshold sets and equal size means equal set.
    if (static_cast<int>(survivors.size()) == current.size()) {
      result.surviving_set = current;
      return result;
    }
    current = HypothesisSet::from_ids(std::move(survivors), m, "stepdown");
  }
  result.surviving_set = current;
  return result;
}

CalibrationResult fwer_threshold(const BootstrapSample& sample, double alpha, int threads) {
  check_alpha(alpha);
  if (sample.B < 1) throw std::invalid_argument("fwer_threshold: empty bootstrap sample");
  CalibrationResult result;
  result.alpha = alpha;
  result.B = sample.B;
  result.method = CalibrationMethod::FwerMinP;
  result.f_samples.resize(static_cast<std::size_t>(sample.B));
  parallel_for(sample.B, threads, [&](int b) {
    const Matrix& field = sample.stat_fields[static_cast<std::size_t>(b)];
    double min_p = 1.0;
    for (Eigen::Index j = 0; j < field.cols(); ++j) {
      for (Eigen::Index i = 0; i < field.rows(); ++i) {
        min_p = std::min(min_p, p_from_t(field(i, j), sample.dof, sample.sidedness));
      }
    }
    result.f_samples[static_cast<std::size_t>(b)] = min_p;
  });
  result.lambda_star =
      order_statistic(result.f_samples, quantile_order_index(alpha, sample.B));
  return result;
}

HypothesisSet fwer_rejections(const StatField& p_field, double lambda) {
  if (p_field.kind == StatKind::TStatistic) {
    throw std::invalid_argument("fwer_rejections: field must hold p-values");
  }
  const int m = p_field.n_hypotheses();
  std::vector<int> ids;
  for (int id = 0; id < m; ++id) {
    if (p_field.at_id(id) <= lambda) ids.push_back(id);
  }
  return HypothesisSet::from_ids(std::move(ids), m, "fwer");
}

}  // namespace fdpboot

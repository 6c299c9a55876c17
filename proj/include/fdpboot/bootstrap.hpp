#pragma once

#include "fdpboot/bounds.hpp"
#include "fdpboot/model.hpp"
#include "fdpboot/templates.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fdpboot {

// B bootstrap t-statistic fields (L x m_pts each) drawn around one fit.
struct BootstrapSample {
  std::vector<Matrix> stat_fields;
  std::uint64_t seed = 0;
  int B = 0;
  int dof = 0;
  Sidedness sidedness = Sidedness::TwoSided;
};

enum class CalibrationMethod { SingleStep, StepDown, Simes, Ari, FwerMinP };

std::string method_tag(CalibrationMethod method);

struct CalibrationResult {
  double lambda_star = 0.0;
  double alpha = 0.0;
  int B = 0;
  CalibrationMethod method = CalibrationMethod::SingleStep;
  std::optional<HypothesisSet> surviving_set;  // step-down only
  std::vector<double> f_samples;               // one per replicate
  int iterations = 0;                          // step-down only
  bool surviving_set_emptied = false;          // step-down fallback flag
};

// Residual bootstrap: resample fitted residual rows with replacement,
// rebuild responses around the fitted mean and recompute centered t fields
// (numerator c'(beta^b - beta), fresh sigma^b, same dof). Replicate b draws
// from a child generator of (seed, b), so output is independent of thread
// count and replicate order.
BootstrapSample draw_bootstrap(const ModelFit& fit, const Dataset& data, int B,
                               std::uint64_t seed,
                               Sidedness sidedness = Sidedness::TwoSided,
                               int threads = 1);

// Pivotal statistic f_H(T) = min_{k <= K ^ |H|} t_k^{-1}(p_(k:H)). Accepts a
// t-statistic field (p-values computed with its dof) or a p-value field
// (entries used directly). Empty subsets give +infinity.
double f_statistic(const StatField& field, const HypothesisSet& subset,
                   const TemplateFamily& family,
                   Sidedness sidedness = Sidedness::TwoSided);

// lambda* = ceil(alpha*B)-th ascending order statistic of f over the
// replicates, the empirical lower alpha-quantile.
CalibrationResult calibrate_single_step(const BootstrapSample& sample,
                                        const HypothesisSet& subset,
                                        const TemplateFamily& family, double alpha,
                                        int threads = 1);

// Iterative refinement: recalibrate over the survivors of the k = 1
// threshold until the set stabilizes. Reuses the same bootstrap fields.
CalibrationResult calibrate_step_down(const BootstrapSample& sample,
                                      const StatField& observed_p_values,
                                      const TemplateFamily& family, double alpha,
                                      int max_iterations = 100, int threads = 1);

// Min-p FWER threshold: alpha-quantile of the bootstrap distribution of the
// smallest p-value over all hypotheses.
CalibrationResult fwer_threshold(const BootstrapSample& sample, double alpha,
                                 int threads = 1);

// Rejections {h : p_h <= lambda} for a calibrated threshold.
HypothesisSet fwer_rejections(const StatField& p_field, double lambda);

// Smallest k with k/B >= alpha, evaluated on the empirical CDF so that e.g.
// alpha = 0.1, B = 100 selects k = 10 despite 0.1 not being representable.
int quantile_order_index(double alpha, int B);

}  // namespace fdpboot

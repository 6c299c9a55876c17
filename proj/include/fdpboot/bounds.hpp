#pragma once

#include "fdpboot/model.hpp"
#include "fdpboot/templates.hpp"

#include <string>
#include <vector>

namespace fdpboot {

// Subset of hypothesis ids (id = l * m_pts + v), kept sorted and unique.
struct HypothesisSet {
  std::vector<int> indices;
  std::string label;

  static HypothesisSet full(int m, std::string label = "all");
  // Sorts, deduplicates, and range-checks the ids against m.
  static HypothesisSet from_ids(std::vector<int> ids, int m, std::string label = "");

  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
};

struct BoundReport {
  int set_size = 0;
  int false_positive_bound = 0;  // V-bar
  double tdp_lower = 0.0;
  double fdp_upper = 0.0;
  double lambda_used = 0.0;
  std::string method;
};

// Post hoc bound V-bar(H) = min_k (#{h in H : p_h > t_k(lambda)} + zeta_k),
// capped at |H|. Boundary p-values count as rejected (p <= t is in R_k).
// zeta defaults to k - 1 and must be nonnegative and nondecreasing.
BoundReport vbar(const StatField& p_field, const HypothesisSet& subset,
                 const TemplateFamily& family, double lambda,
                 const std::vector<int>* zeta = nullptr);

// Simes calibration: lambda = alpha for the linear template.
double simes_lambda(double alpha);

// Hommel factor h(alpha) = max{ i : p_(m-i+j) > alpha*j/i for all j <= i },
// 0 when no i qualifies.
int hommel_factor(const std::vector<double>& p_values, double alpha);
int hommel_factor(const StatField& p_field, double alpha);

// ARI calibration: alpha * m / h(alpha) clamped to 1; 1 when h = 0.
double ari_lambda(const std::vector<double>& p_values, double alpha);
double ari_lambda(const StatField& p_field, double alpha);

// Benjamini-Hochberg step-up rejection set at level q (ties by id).
HypothesisSet bh_rejection_set(const StatField& p_field, double q);

struct CurvePoint {
  int k = 0;
  int v_bar = 0;
  int tp_lower = 0;
  double fdp_upper = 0.0;
};

// Confidence curves over the k smallest p-values, k = 1..k_max.
std::vector<CurvePoint> topk_curves(const StatField& p_field, const TemplateFamily& family,
                                    double lambda, int k_max,
                                    const std::vector<int>* zeta = nullptr);

// Flattens a p-value field into id order (id = l * m_pts + v).
std::vector<double> flatten_p_values(const StatField& p_field);

}  // namespace fdpboot

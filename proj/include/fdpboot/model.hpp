#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdpboot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown on shape mismatches between design/response/contrasts.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Sidedness { TwoSided, OneSided };

enum class StatKind { TStatistic, PValueTwoSided, PValueOneSided };

// One multivariate dataset: n subjects observed at m_pts points, with an
// L x p contrast matrix. Hypotheses are indexed as id = l * m_pts + v.
struct Dataset {
  Matrix design;     // n x p
  Matrix response;   // n x m_pts
  Matrix contrasts;  // L x p
  std::vector<std::string> point_labels;  // optional, length m_pts

  int n_subjects() const { return static_cast<int>(design.rows()); }
  int n_covariates() const { return static_cast<int>(design.cols()); }
  int n_points() const { return static_cast<int>(response.cols()); }
  int n_contrasts() const { return static_cast<int>(contrasts.rows()); }
  int n_hypotheses() const { return n_contrasts() * n_points(); }
};

// Throws DimensionError / std::invalid_argument when the Dataset
// invariants fail (shape mismatch, non-finite entries, all-zero contrast).
void validate(const Dataset& data);

struct ModelFit {
  Matrix beta_hat;      // p x m_pts
  Matrix residuals;     // n x m_pts
  Vector sigma_hat;     // m_pts
  int rank = 0;
  Matrix gram_inverse;  // p x p, pseudo-inverse of X'X when rank deficient

  int dof(int n_subjects) const { return n_subjects - rank; }
  bool rank_deficient(int n_covariates) const { return rank < n_covariates; }
};

// L x m_pts field of statistics or p-values, plus the residual dof.
struct StatField {
  Matrix values;
  int dof = 0;
  StatKind kind = StatKind::TStatistic;

  int n_contrasts() const { return static_cast<int>(values.rows()); }
  int n_points() const { return static_cast<int>(values.cols()); }
  int n_hypotheses() const { return n_contrasts() * n_points(); }
  double at_id(int id) const {
    return values(id / values.cols(), id % values.cols());
  }
};

// Point-wise least squares, one orthogonal factorization of the design
// shared by every point. Rank-deficient designs get the minimum-norm
// solution; callers can check fit.rank_deficient().
ModelFit fit(const Dataset& data);

// Contrast t statistics. null_offsets, when present, is subtracted from the
// contrast estimates (L x m_pts). sigma 0 with a zero numerator gives 0,
// with a nonzero numerator gives +/-infinity.
StatField t_statistics(const ModelFit& fit, const Dataset& data,
                       const Matrix* null_offsets = nullptr);

// Point-wise F statistic over all L contrasts jointly.
Vector f_statistics(const ModelFit& fit, const Dataset& data);

// Student p-values from a t-statistic field.
StatField p_values(const StatField& stats, Sidedness sidedness);

}  // namespace fdpboot

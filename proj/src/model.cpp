#include "fdpboot/model.hpp"

#include "fdpboot/student.hpp"

#include <cmath>
#include <limits>

namespace fdpboot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_infinity(double numerator) { return numerator > 0 ? kInf : -kInf; }
}  // namespace

void validate(const Dataset& data) {
  const auto n = data.design.rows();
  const auto p = data.design.cols();
  if (n < 2) throw std::invalid_argument("dataset: need at least 2 subjects");
  if (p < 1) throw std::invalid_argument("dataset: design needs at least one column");
  if (data.response.rows() != n) {
    throw DimensionError("dataset: response rows must match design rows");
  }
  if (data.response.cols() < 1) {
    throw DimensionError("dataset: response needs at least one point column");
  }
  if (data.contrasts.rows() < 1) {
    throw DimensionError("dataset: need at least one contrast row");
  }
  if (data.contrasts.cols() != p) {
    throw DimensionError("dataset: contrast columns must match design columns");
  }
  if (!data.design.allFinite()) throw std::invalid_argument("dataset: design has non-finite entries");
  if (!data.response.allFinite()) throw std::invalid_argument("dataset: response has non-finite entries");
  if (!data.contrasts.allFinite()) throw std::invalid_argument("dataset: contrasts have non-finite entries");
  for (Eigen::Index l = 0; l < data.contrasts.rows(); ++l) {
    if (data.contrasts.row(l).cwiseAbs().maxCoeff() == 0.0) {
      throw std::invalid_argument("dataset: contrast row " + std::to_string(l) + " is all zero");
    }
  }
  if (!data.point_labels.empty() &&
      static_cast<Eigen::Index>(data.point_labels.size()) != data.response.cols()) {
    throw DimensionError("dataset: point_labels length must match response columns");
  }
}

ModelFit fit(const Dataset& data) {
  validate(data);
  const int n = data.n_subjects();

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(data.design);
  // |R_ii| <= n * eps * |R_00| counts as zero; R_00 is the largest diagonal
  // under column pivoting.
  cod.setThreshold(static_cast<double>(n) * std::numeric_limits<double>::epsilon());
  const int rank = static_cast<int>(cod.rank());
  if (rank < 1) throw std::invalid_argument("fit: design has rank 0");
  if (n - rank < 1) throw std::invalid_argument("fit: no residual degrees of freedom (n - rank = 0)");

  ModelFit out;
  out.rank = rank;
  out.beta_hat = cod.solve(data.response);
  out.residuals = data.response - data.design * out.beta_hat;
  const Matrix pinv = cod.pseudoInverse();
  out.gram_inverse = pinv * pinv.transpose();
  out.sigma_hat = (out.residuals.colwise().squaredNorm() / static_cast<double>(n - rank))
                      .cwiseSqrt()
                      .transpose();
  return out;
}

StatField t_statistics(const ModelFit& fit, const Dataset& data, const Matrix* null_offsets) {
  const int L = data.n_contrasts();
  const int m_pts = data.n_points();
  if (fit.beta_hat.cols() != m_pts || fit.beta_hat.rows() != data.design.cols()) {
    throw DimensionError("t_statistics: fit does not match dataset");
  }
  if (null_offsets && (null_offsets->rows() != L || null_offsets->cols() != m_pts)) {
    throw DimensionError("t_statistics: null_offsets must be L x m_pts");
  }

  Vector denom_scale(L);  // sqrt(c_l' (X'X)^-1 c_l)
  for (int l = 0; l < L; ++l) {
    const double q = data.contrasts.row(l) * fit.gram_inverse * data.contrasts.row(l).transpose();
    denom_scale(l) = q > 0.0 ? std::sqrt(q) : 0.0;
  }

  Matrix numer = data.contrasts * fit.beta_hat;
  if (null_offsets) numer -= *null_offsets;

  StatField field;
  field.values.resize(L, m_pts);
  field.dof = fit.dof(data.n_subjects());
  field.kind = StatKind::TStatistic;
  for (int v = 0; v < m_pts; ++v) {
    const double s = fit.sigma_hat(v);
    for (int l = 0; l < L; ++l) {
      const double num = numer(l, v);
      const double den = s * denom_scale(l);
      if (den > 0.0) {
        field.values(l, v) = num / den;
      } else {
        field.values(l, v) = num == 0.0 ? 0.0 : signed_infinity(num);
      }
    }
  }
  return field;
}

Vector f_statistics(const ModelFit& fit, const Dataset& data) {
  const int m_pts = data.n_points();
  const Matrix middle = data.contrasts * fit.gram_inverse * data.contrasts.transpose();
  Eigen::FullPivLU<Matrix> lu(middle);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("f_statistics: C (X'X)^-1 C' is singular");
  }
  const int rank_c =
      static_cast<int>(Eigen::ColPivHouseholderQR<Matrix>(data.contrasts).rank());

  const Matrix numer = data.contrasts * fit.beta_hat;   // L x m_pts
  const Matrix solved = lu.solve(numer);                // (C G C')^-1 C beta
  Vector out(m_pts);
  for (int v = 0; v < m_pts; ++v) {
    const double quad = numer.col(v).dot(solved.col(v));
    const double s2 = fit.sigma_hat(v) * fit.sigma_hat(v);
    if (s2 > 0.0) {
      out(v) = quad / (static_cast<double>(rank_c) * s2);
    } else {
      out(v) = quad == 0.0 ? 0.0 : kInf;
    }
  }
  return out;
}

StatField p_values(const StatField& stats, Sidedness sidedness) {
  if (stats.kind != StatKind::TStatistic) {
    throw std::invalid_argument("p_values: input must hold t statistics");
  }
  if (stats.dof < 1) throw std::invalid_argument("p_values: dof must be >= 1");
  StatField out;
  out.dof = stats.dof;
  out.kind = sidedness == Sidedness::TwoSided ? StatKind::PValueTwoSided
                                              : StatKind::PValueOneSided;
  out.values.resize(stats.values.rows(), stats.values.cols());
  for (Eigen::Index j = 0; j < stats.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < stats.values.rows(); ++i) {
      const double t = stats.values(i, j);
      out.values(i, j) = sidedness == Sidedness::TwoSided
                             ? student_p_two_sided(t, stats.dof)
                             : student_p_one_sided(t, stats.dof);
    }
  }
  return out;
}

}  // namespace fdpboot

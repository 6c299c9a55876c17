#include "fdpboot/templates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fdpboot {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("template: lambda must lie in [0, 1]");
  }
}

void check_pvalue(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("template: p must lie in [0, 1]");
  }
}

}  // namespace

TemplateFamily::TemplateFamily(TemplateKind kind, int size, int total)
    : kind_(kind), size_(size), total_(total) {
  if (total_ < 1) throw std::invalid_argument("template: total hypotheses must be >= 1");
  if (size_ < 1 || size_ > total_) {
    throw std::invalid_argument("template: size K must satisfy 1 <= K <= m");
  }
}

TemplateFamily TemplateFamily::linear(int size, int total_hypotheses) {
  return TemplateFamily(TemplateKind::Linear, size, total_hypotheses);
}

TemplateFamily TemplateFamily::custom(int total_hypotheses, std::vector<Fn> thresholds,
                                      std::vector<Fn> inverses) {
  TemplateFamily fam(TemplateKind::Custom, static_cast<int>(thresholds.size()),
                     total_hypotheses);
  if (!inverses.empty() && inverses.size() != thresholds.size()) {
    throw std::invalid_argument("template: need one inverse per threshold (or none)");
  }
  // Spot-check the template axioms on a grid.
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const auto& fn = thresholds[k];
    if (std::fabs(fn(0.0)) > 1e-12) {
      throw std::invalid_argument("template: t_" + std::to_string(k + 1) + "(0) != 0");
    }
    double prev = fn(0.0);
    for (int g = 1; g <= 16; ++g) {
      const double x = static_cast<double>(g) / 16.0;
      const double y = fn(x);
      if (!(y > prev)) {
        throw std::invalid_argument("template: t_" + std::to_string(k + 1) +
                                    " must be strictly increasing");
      }
      prev = y;
    }
  }
  fam.thresholds_ = std::move(thresholds);
  fam.inverses_ = std::move(inverses);
  return fam;
}

double TemplateFamily::threshold(int k, double lambda) const {
  if (k < 1 || k > size_) throw std::out_of_range("template: k out of range");
  check_lambda(lambda);
  if (kind_ == TemplateKind::Linear) {
    return lambda * static_cast<double>(k) / static_cast<double>(total_);
  }
  return thresholds_[static_cast<std::size_t>(k - 1)](lambda);
}

double TemplateFamily::inverse_threshold(int k, double p) const {
  if (k < 1 || k > size_) throw std::out_of_range("template: k out of range");
  check_pvalue(p);
  if (kind_ == TemplateKind::Linear) {
    return p * static_cast<double>(total_) / static_cast<double>(k);
  }
  if (!inverses_.empty()) {
    return inverses_[static_cast<std::size_t>(k - 1)](p);
  }
  const auto& fn = thresholds_[static_cast<std::size_t>(k - 1)];
  if (p > fn(1.0)) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (fn(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fdpboot

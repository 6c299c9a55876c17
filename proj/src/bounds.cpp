#include "fdpboot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fdpboot {

namespace {

void check_p_field(const StatField& field) {
  if (field.kind == StatKind::TStatistic) {
    throw std::invalid_argument("bounds: field must hold p-values, not t statistics");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("bounds: alpha must lie in (0, 1)");
  }
}

std::vector<int> default_zeta(int K) {
  std::vector<int> z(static_cast<std::size_t>(K));
  std::iota(z.begin(), z.end(), 0);
  return z;
}

std::vector<int> resolve_zeta(const std::vector<int>* zeta, int K) {
  if (!zeta) return default_zeta(K);
  if (static_cast<int>(zeta->size()) != K) {
    throw std::invalid_argument("bounds: zeta must have one entry per template threshold");
  }
  int prev = 0;
  for (int z : *zeta) {
    if (z < 0) throw std::invalid_argument("bounds: zeta entries must be nonnegative");
    if (z < prev) throw std::invalid_argument("bounds: zeta must be nondecreasing");
    prev = z;
  }
  return *zeta;
}

// Thresholds sorted ascending with their zeta, so one sweep over the sorted
// p-values covers every k. Custom families need not be monotone in k.
struct SweepEntry {
  double threshold;
  int zeta;
};

std::vector<SweepEntry> sweep_entries(const TemplateFamily& family, double lambda,
                                      const std::vector<int>& zeta) {
  std::vector<SweepEntry> entries(static_cast<std::size_t>(family.size()));
  for (int k = 1; k <= family.size(); ++k) {
    entries[static_cast<std::size_t>(k - 1)] = {family.threshold(k, lambda), zeta[k - 1]};
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     return a.threshold < b.threshold;
                   });
  return entries;
}

int vbar_count(const std::vector<double>& sorted_p, const std::vector<SweepEntry>& entries) {
  const int h = static_cast<int>(sorted_p.size());
  int best = h;
  std::size_t ptr = 0;  // #{p <= threshold} so far
  for (const auto& e : entries) {
    while (ptr < sorted_p.size() && sorted_p[ptr] <= e.threshold) ++ptr;
    const int candidate = h - static_cast<int>(ptr) + e.zeta;
    if (candidate < best) best = candidate;
  }
  return best;
}

}  // namespace

HypothesisSet HypothesisSet::full(int m, std::string label) {
  HypothesisSet s;
  s.indices.resize(static_cast<std::size_t>(m));
  std::iota(s.indices.begin(), s.indices.end(), 0);
  s.label = std::move(label);
  return s;
}

HypothesisSet HypothesisSet::from_ids(std::vector<int> ids, int m, std::string label) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && (ids.front() < 0 || ids.back() >= m)) {
    throw std::invalid_argument("hypothesis set: id out of range [0, m)");
  }
  HypothesisSet s;
  s.indices = std::move(ids);
  s.label = std::move(label);
  return s;
}

BoundReport vbar(const StatField& p_field, const HypothesisSet& subset,
                 const TemplateFamily& family, double lambda, const std::vector<int>* zeta) {
  check_p_field(p_field);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("vbar: lambda must lie in [0, 1]");
  }
  const auto zetas = resolve_zeta(zeta, family.size());

  BoundReport report;
  report.lambda_used = lambda;
  report.set_size = subset.size();
  if (subset.empty()) return report;

  std::vector<double> p;
  p.reserve(subset.indices.size());
  for (int id : subset.indices) p.push_back(p_field.at_id(id));
  std::sort(p.begin(), p.end());

  const int bound = std::min(vbar_count(p, sweep_entries(family, lambda, zetas)),
                             subset.size());
  report.false_positive_bound = bound;
  report.tdp_lower = static_cast<double>(subset.size() - bound) / subset.size();
  report.fdp_upper = static_cast<double>(bound) / subset.size();
  return report;
}

double simes_lambda(double alpha) {
  check_alpha(alpha);
  return alpha;
}

int hommel_factor(const std::vector<double>& p_values, double alpha) {
  check_alpha(alpha);
  const int m = static_cast<int>(p_values.size());
  if (m < 1) throw std::invalid_argument("hommel_factor: need at least one p-value");
  std::vector<double> p(p_values);
  std::sort(p.begin(), p.end());
  for (int i = m; i >= 1; --i) {
    bool ok = true;
    for (int j = 1; j <= i; ++j) {
      if (p[static_cast<std::size_t>(m - i + j - 1)] <=
          alpha * static_cast<double>(j) / static_cast<double>(i)) {
        ok = false;
        break;
      }
    }
    if (ok) return i;
  }
  return 0;
}

int hommel_factor(const StatField& p_field, double alpha) {
  check_p_field(p_field);
  return hommel_factor(flatten_p_values(p_field), alpha);
}

double ari_lambda(const std::vector<double>& p_values, double alpha) {
  const int h = hommel_factor(p_values, alpha);
  if (h == 0) return 1.0;
  const double bar = alpha * static_cast<double>(p_values.size()) / static_cast<double>(h);
  return bar > 1.0 ? 1.0 : bar;
}

double ari_lambda(const StatField& p_field, double alpha) {
  check_p_field(p_field);
  return ari_lambda(flatten_p_values(p_field), alpha);
}

HypothesisSet bh_rejection_set(const StatField& p_field, double q) {
  check_p_field(p_field);
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("bh: q must lie in (0, 1)");
  const int m = p_field.n_hypotheses();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = p_field.at_id(a), pb = p_field.at_id(b);
    return pa < pb || (pa == pb && a < b);
  });
  int n_reject = 0;
  for (int k = m; k >= 1; --k) {
    if (p_field.at_id(order[static_cast<std::size_t>(k - 1)]) <=
        q * static_cast<double>(k) / static_cast<double>(m)) {
      n_reject = k;
      break;
    }
  }
  std::vector<int> ids(order.begin(), order.begin() + n_reject);
  return HypothesisSet::from_ids(std::move(ids), m, "bh");
}

std::vector<CurvePoint> topk_curves(const StatField& p_field, const TemplateFamily& family,
                                    double lambda, int k_max, const std::vector<int>* zeta) {
  check_p_field(p_field);
  const int m = p_field.n_hypotheses();
  if (k_max < 1 || k_max > m) throw std::invalid_argument("topk_curves: k_max must lie in [1, m]");
  const auto zetas = resolve_zeta(zeta, family.size());

  std::vector<double> p = flatten_p_values(p_field);
  std::sort(p.begin(), p.end());
  const auto entries = sweep_entries(family, lambda, zetas);
  const int K = static_cast<int>(entries.size());

  // counts[j] = #{p <= tau_j} over the full field, nondecreasing in j once
  // thresholds are sorted.
  std::vector<int> counts(entries.size());
  {
    std::size_t ptr = 0;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      while (ptr < p.size() && p[ptr] <= entries[j].threshold) ++ptr;
      counts[j] = static_cast<int>(ptr);
    }
  }
  // prefix_min[j] = min_{i <= j} (zeta_i - counts_i); for H_k (the k smallest
  // p-values) the count of survivors above tau_j is k - min(counts_j, k), so
  // V-bar(H_k) = min( k + prefix_min[j*-1], min_{j >= j*} zeta_j ) ^ k where
  // j* is the first j with counts_j >= k. zeta is nondecreasing but the sort
  // over thresholds may reorder it, so suffix minima are precomputed too.
  std::vector<int> prefix_min(entries.size());
  std::vector<int> suffix_min_zeta(entries.size() + 1);
  suffix_min_zeta[entries.size()] = std::numeric_limits<int>::max();
  for (int j = 0; j < K; ++j) {
    const int value = entries[static_cast<std::size_t>(j)].zeta - counts[static_cast<std::size_t>(j)];
    prefix_min[static_cast<std::size_t>(j)] = j == 0 ? value : std::min(prefix_min[static_cast<std::size_t>(j - 1)], value);
  }
  for (int j = K - 1; j >= 0; --j) {
    suffix_min_zeta[static_cast<std::size_t>(j)] =
        std::min(suffix_min_zeta[static_cast<std::size_t>(j + 1)], entries[static_cast<std::size_t>(j)].zeta);
  }

  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(k_max));
  int j_star = 0;
  for (int k = 1; k <= k_max; ++k) {
    while (j_star < K && counts[static_cast<std::size_t>(j_star)] < k) ++j_star;
    long long best = k;  // cap at |H_k|
    if (j_star > 0) {
      best = std::min(best, static_cast<long long>(k) + prefix_min[static_cast<std::size_t>(j_star - 1)]);
    }
    if (j_star < K) {
      best = std::min(best, static_cast<long long>(suffix_min_zeta[static_cast<std::size_t>(j_star)]));
    }
    CurvePoint pt;
    pt.k = k;
    pt.v_bar = static_cast<int>(best);
    pt.tp_lower = k - pt.v_bar;
    pt.fdp_upper = static_cast<double>(pt.v_bar) / static_cast<double>(k);
    curve.push_back(pt);
  }
  return curve;
}

std::vector<double> flatten_p_values(const StatField& p_field) {
  const int L = p_field.n_contrasts();
  const int m_pts = p_field.n_points();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(L) * static_cast<std::size_t>(m_pts));
  for (int l = 0; l < L; ++l) {
    for (int v = 0; v < m_pts; ++v) out.push_back(p_field.values(l, v));
  }
  return out;
}

}  // namespace fdpboot

#include "fdpboot/scenario.hpp"

#include "fdpboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdpboot {

namespace {

std::vector<int> draw_groups(Rng& rng, int n) {
  std::vector<int> groups(static_cast<std::size_t>(n));
  for (int attempt = 0; attempt < 100000; ++attempt) {
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
      const int g = static_cast<int>(rng.uniform_index(3));
      groups[static_cast<std::size_t>(i)] = g;
      ++counts[g];
    }
    if (counts[0] > 0 && counts[1] > 0 && counts[2] > 0) return groups;
  }
  throw ScenarioError("scenario: could not draw non-empty groups");
}

std::vector<int> draw_null_ids(Rng& rng, int m, int count) {
  std::vector<int> ids(static_cast<std::size_t>(m));
  std::iota(ids.begin(), ids.end(), 0);
  // Partial Fisher-Yates: the first `count` slots become the sample.
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m - i)));
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
  }
  ids.resize(static_cast<std::size_t>(count));
  return ids;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t rep_seed) {
  if (config.n_subjects < 3) {
    throw ScenarioError("scenario: need at least 3 subjects for 3 non-empty groups");
  }
  if (!(config.pi0 >= 0.0 && config.pi0 <= 1.0)) {
    throw ScenarioError("scenario: pi0 must lie in [0, 1]");
  }

  const int n = config.n_subjects;
  GrfConfig noise_cfg = config.grf;
  noise_cfg.n_fields = n;
  noise_cfg.seed = child_seed(rep_seed, 0);
  const auto noise = generate_grf(noise_cfg);

  Rng group_rng(child_seed(rep_seed, 1));
  const auto groups = draw_groups(group_rng, n);

  const int V = config.grf.rows * config.grf.cols;
  const int m = 2 * V;
  // round-half-to-even keeps the null count deterministic when pi0*m sits
  // on a half integer
  const int n_nulls = static_cast<int>(std::nearbyint(config.pi0 * static_cast<double>(m)));
  Rng null_rng(child_seed(rep_seed, 2));
  auto null_ids = draw_null_ids(null_rng, m, n_nulls);

  std::vector<char> is_null(static_cast<std::size_t>(m), 0);
  for (int id : null_ids) is_null[static_cast<std::size_t>(id)] = 1;

  Scenario out;
  out.groups = groups;
  out.true_nulls = HypothesisSet::from_ids(std::move(null_ids), m, "nulls");

  out.dataset.design = Matrix::Zero(n, 3);
  for (int i = 0; i < n; ++i) out.dataset.design(i, groups[static_cast<std::size_t>(i)]) = 1.0;
  out.dataset.contrasts.resize(2, 3);
  out.dataset.contrasts << -1.0, 1.0, 0.0,
                            0.0, -1.0, 1.0;

  // Y_i(v) = 1[i in G2, (1,v) not null] + 1[i in G3, (1,v) not null]
  //        + 1[i in G3, (2,v) not null] + eps_i(v)
  out.dataset.response.resize(n, V);
  for (int i = 0; i < n; ++i) {
    const int g = groups[static_cast<std::size_t>(i)];
    for (int v = 0; v < V; ++v) {
      const int r = v / config.grf.cols;
      const int c = v % config.grf.cols;
      double y = noise[static_cast<std::size_t>(i)](r, c);
      const bool null1 = is_null[static_cast<std::size_t>(v)] != 0;        // (1, v) -> id v
      const bool null2 = is_null[static_cast<std::size_t>(V + v)] != 0;    // (2, v) -> id V + v
      if (g == 1 && !null1) y += 1.0;
      if (g == 2 && !null1) y += 1.0;
      if (g == 2 && !null2) y += 1.0;
      out.dataset.response(i, v) = y;
    }
  }
  return out;
}

}  // namespace fdpboot

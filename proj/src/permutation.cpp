#include "fairlift/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairlift {

namespace {

// Single-pass expected-count cells over a row span.
struct SpanCells {
  double tp = 0.0, fn = 0.0, fp = 0.0, tn = 0.0;
  std::int64_t positives = 0, negatives = 0;
};

template <typename Rows>
SpanCells accumulate_span(const Rows& rows, std::size_t begin, std::size_t end) {
  SpanCells cells;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& row = rows[i];
    if (row.label == 1) {
      cells.tp += row.score;
      cells.fn += 1.0 - row.score;
      ++cells.positives;
    } else {
      cells.fp += row.score;
      cells.tn += 1.0 - row.score;
      ++cells.negatives;
    }
  }
  return cells;
}

std::optional<double> cells_metric(const SpanCells& cells, PerformanceMetric metric) {
  GeneralizedConfusionMatrix gcm;
  gcm.exp_tp = cells.tp;
  gcm.exp_fn = cells.fn;
  gcm.exp_fp = cells.fp;
  gcm.exp_tn = cells.tn;
  gcm.positives = cells.positives;
  gcm.negatives = cells.negatives;
  gcm.n = cells.positives + cells.negatives;
  return performance_metric(gcm, metric);
}

}  // namespace

RowStatistic statistic_for(PerformanceMetric metric) {
  if (metric == PerformanceMetric::Auc) {
    return [](std::span<const LabeledScore> rows) -> std::optional<double> {
      std::vector<std::int64_t> labels;
      std::vector<double> scores;
      labels.reserve(rows.size());
      scores.reserve(rows.size());
      for (const auto& row : rows) {
        labels.push_back(row.label);
        scores.push_back(row.score);
      }
      return auc(labels, scores);
    };
  }
  return [metric](std::span<const LabeledScore> rows) -> std::optional<double> {
    return cells_metric(accumulate_span(rows, 0, rows.size()), metric);
  };
}

PermutationTestResult permutation_test(std::span<const LabeledScore> group1_rows,
                                       std::span<const LabeledScore> group2_rows,
                                       const GroupPair& pair, const PermutationTestSpec& spec,
                                       const RowStatistic& statistic) {
  const std::size_t n1 = group1_rows.size();
  const std::size_t n2 = group2_rows.size();
  if (n1 < 2 || n2 < 2) {
    raise(Errc::DegenerateGroup, "permutation test needs >= 2 rows per group (" +
                                     std::to_string(n1) + " vs " + std::to_string(n2) + ")");
  }
  if (spec.num_permutations < 1) {
    raise(Errc::InvalidArgument, "numPermutations must be >= 1");
  }

  auto stat1 = statistic(group1_rows);
  auto stat2 = statistic(group2_rows);
  if (!stat1 || !stat2) {
    raise(Errc::UndefinedMetric, "statistic undefined on a group sample for metric " + spec.metric);
  }
  const double observed = *stat1 - *stat2;
  const double observed_abs = std::abs(observed);

  // Pool both samples and reshuffle the group assignment each trial,
  // preserving group sizes. A partial Fisher-Yates from any starting
  // arrangement draws a uniform size-n1 subset, so the pool is reused
  // across trials without resetting.
  std::vector<LabeledScore> pool;
  pool.reserve(n1 + n2);
  pool.insert(pool.end(), group1_rows.begin(), group1_rows.end());
  pool.insert(pool.end(), group2_rows.begin(), group2_rows.end());

  SeededRng rng(spec.seed);
  int at_least_as_extreme = 0;
  int skipped = 0;
  const std::size_t total = n1 + n2;
  for (int trial = 0; trial < spec.num_permutations; ++trial) {
    for (std::size_t i = 0; i < n1; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.bounded(total - i));
      std::swap(pool[i], pool[j]);
    }
    auto perm1 = statistic(std::span<const LabeledScore>(pool.data(), n1));
    auto perm2 = statistic(std::span<const LabeledScore>(pool.data() + n1, n2));
    if (!perm1 || !perm2) {
      ++skipped;  // counted in the denominator via num_permutations
      continue;
    }
    if (std::abs(*perm1 - *perm2) >= observed_abs) {
      ++at_least_as_extreme;
    }
  }

  PermutationTestResult result;
  result.metric = spec.metric;
  result.group_pair = pair;
  result.observed_diff = observed;
  result.num_permutations = spec.num_permutations;
  result.skipped_trials = skipped;
  result.n1 = n1;
  result.n2 = n2;
  result.seed = spec.seed;
  result.p_value = (1.0 + static_cast<double>(at_least_as_extreme)) /
                   (1.0 + static_cast<double>(spec.num_permutations));
  return result;
}

PairwiseTestOutcome run_pairwise_tests(const JoinedView& view, const PermutationTestSpec& spec,
                                       const RowStatistic* custom_statistic) {
  RowStatistic statistic;
  if (custom_statistic != nullptr) {
    statistic = *custom_statistic;
  } else {
    auto metric = performance_metric_from_token(spec.metric);
    if (!metric) {
      raise(Errc::UnknownMetricToken, "no performance metric named '" + spec.metric + "'");
    }
    statistic = statistic_for(*metric);
  }

  const bool labeled = view.has_labels();
  auto labels = labeled ? view.labels() : std::span<const std::int64_t>{};
  auto scores = view.scores();

  auto sample_group = [&](std::int32_t g, std::uint64_t seed) {
    const auto& rows = view.group_rows(g);
    auto picked = sample_indices(rows.size(), std::min(spec.sample_size, rows.size()), seed);
    std::vector<LabeledScore> out;
    out.reserve(picked.size());
    for (auto i : picked) {
      const std::size_t r = rows[i];
      out.push_back({labeled ? labels[r] : -1, scores[r]});
    }
    return out;
  };

  PairwiseTestOutcome outcome;
  const auto group_count = static_cast<std::int32_t>(view.group_count());
  std::uint64_t pair_index = 0;
  for (std::int32_t a = 0; a < group_count; ++a) {
    for (std::int32_t b = a + 1; b < group_count; ++b, ++pair_index) {
      GroupPair pair{view.group_names()[static_cast<std::size_t>(a)],
                     view.group_names()[static_cast<std::size_t>(b)]};
      try {
        auto rows1 = sample_group(a, derive_seed(spec.seed, pair_index * 3 + 1));
        auto rows2 = sample_group(b, derive_seed(spec.seed, pair_index * 3 + 2));
        PermutationTestSpec pair_spec = spec;
        pair_spec.seed = derive_seed(spec.seed, pair_index * 3);
        outcome.results.push_back(permutation_test(rows1, rows2, pair, pair_spec, statistic));
      } catch (const Error& error) {
        outcome.notes.push_back(pair.g1 + " vs " + pair.g2 + ": " + error.what());
      }
    }
  }
  return outcome;
}

}  // namespace fairlift

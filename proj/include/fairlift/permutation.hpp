#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairlift/engine.hpp"
#include "fairlift/join.hpp"
#include "fairlift/model_metrics.hpp"

namespace fairlift {

struct LabeledScore {
  std::int64_t label;
  double score;
};

/// Statistic evaluated on one group's rows; nullopt means undefined on that
/// sample (single class, zero denominator, ...).
using RowStatistic = std::function<std::optional<double>(std::span<const LabeledScore>)>;

RowStatistic statistic_for(PerformanceMetric metric);

struct PermutationTestSpec {
  std::string metric = "RECALL";
  int num_permutations = 1000;
  std::size_t sample_size = 100000;  // per-group cap
  std::uint64_t seed = 0;

  bool operator==(const PermutationTestSpec&) const = default;
};

struct PermutationTestResult {
  std::string metric;
  GroupPair group_pair;
  double observed_diff = 0.0;
  double p_value = 1.0;
  int num_permutations = 0;
  int skipped_trials = 0;  // trials where the statistic was undefined
  std::size_t n1 = 0;      // rows sampled per group
  std::size_t n2 = 0;
  std::uint64_t seed = 0;
};

/// Two-sided permutation test for a difference in `statistic` between two row
/// samples. Group assignments are shuffled across the pooled rows (preserving
/// group sizes) by a private seeded generator; trials run sequentially on one
/// thread. p = (1 + #{|perm diff| >= |observed diff|}) / (1 + trials), the
/// add-one estimator, so p is always in (0, 1]. Trials with an undefined
/// statistic are skipped and counted in skipped_trials (the denominator keeps
/// the configured trial count).
PermutationTestResult permutation_test(std::span<const LabeledScore> group1_rows,
                                       std::span<const LabeledScore> group2_rows,
                                       const GroupPair& pair, const PermutationTestSpec& spec,
                                       const RowStatistic& statistic);

struct PairwiseTestOutcome {
  std::vector<PermutationTestResult> results;
  std::vector<std::string> notes;  // per-pair errors, e.g. degenerate groups
};

/// One test per unordered group pair. Each pair samples up to
/// spec.sample_size rows per group with independently derived seeds; errors
/// on one pair do not abort the others. A custom statistic overrides the
/// metric token lookup.
PairwiseTestOutcome run_pairwise_tests(const JoinedView& view, const PermutationTestSpec& spec,
                                       const RowStatistic* custom_statistic = nullptr);

}  // namespace fairlift

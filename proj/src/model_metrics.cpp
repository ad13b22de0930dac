#include "fairlift/model_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairlift {

namespace {

// Per-group accumulator for expected confusion cells. Fixed-point sums keep
// the reduction associative, so results do not depend on chunking.
struct GroupCells {
  FixedPointSum tp, fn, fp, tn;
  std::int64_t positives = 0;
  std::int64_t negatives = 0;

  GroupCells& operator+=(const GroupCells& other) {
    tp += other.tp;
    fn += other.fn;
    fp += other.fp;
    tn += other.tn;
    positives += other.positives;
    negatives += other.negatives;
    return *this;
  }
};

std::vector<GroupCells> accumulate_cells(const JoinedView& view, const EngineOptions& engine) {
  auto labels = view.labels();
  auto scores = view.scores();
  const auto groups = view.group_ids();
  const std::size_t group_count = view.group_count();
  auto chunks = plan_chunks(view.row_count(), engine.worker_count, engine.target_chunk_rows);

  using Cells = std::vector<GroupCells>;
  return map_reduce(
      chunks,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        Cells local(group_count);
        for (std::size_t r = begin; r < end; ++r) {
          GroupCells& cell = local[static_cast<std::size_t>(groups[r])];
          const double s = scores[r];
          if (labels[r] == 1) {
            cell.tp.add(s);
            cell.fn.add(1.0 - s);
            ++cell.positives;
          } else {
            cell.fp.add(s);
            cell.tn.add(1.0 - s);
            ++cell.negatives;
          }
        }
        return local;
      },
      [](Cells acc, Cells part) {
        for (std::size_t g = 0; g < acc.size(); ++g) {
          acc[g] += part[g];
        }
        return acc;
      },
      Cells(group_count));
}

GeneralizedConfusionMatrix finalize_cells(const GroupCells& cells) {
  GeneralizedConfusionMatrix gcm;
  gcm.exp_tp = cells.tp.value();
  gcm.exp_fn = cells.fn.value();
  gcm.exp_fp = cells.fp.value();
  gcm.exp_tn = cells.tn.value();
  gcm.positives = cells.positives;
  gcm.negatives = cells.negatives;
  gcm.n = cells.positives + cells.negatives;
  return gcm;
}

}  // namespace

std::optional<PerformanceMetric> performance_metric_from_token(const std::string& token) {
  if (token == "PRECISION") return PerformanceMetric::Precision;
  if (token == "RECALL") return PerformanceMetric::Recall;
  if (token == "FPR") return PerformanceMetric::Fpr;
  if (token == "FNR") return PerformanceMetric::Fnr;
  if (token == "ACCURACY") return PerformanceMetric::Accuracy;
  if (token == "AUC") return PerformanceMetric::Auc;
  return std::nullopt;
}

const char* performance_metric_token(PerformanceMetric metric) {
  switch (metric) {
    case PerformanceMetric::Precision:
      return "PRECISION";
    case PerformanceMetric::Recall:
      return "RECALL";
    case PerformanceMetric::Fpr:
      return "FPR";
    case PerformanceMetric::Fnr:
      return "FNR";
    case PerformanceMetric::Accuracy:
      return "ACCURACY";
    case PerformanceMetric::Auc:
      return "AUC";
  }
  return "?";
}

JoinedView normalize_scores(const JoinedView& view, ScoreType score_type) {
  auto scores = view.scores();
  Float64Data normalized;
  normalized.reserve(scores.size());
  if (score_type == ScoreType::Raw) {
    for (double s : scores) {
      normalized.push_back(1.0 / (1.0 + std::exp(-s)));
    }
  } else {
    for (std::size_t r = 0; r < scores.size(); ++r) {
      const double s = scores[r];
      if (!(s >= 0.0 && s <= 1.0)) {
        raise(Errc::ScoreOutOfRange, "PROB score " + std::to_string(s) + " at row " +
                                         std::to_string(r) + " outside [0,1]");
      }
      normalized.push_back(s);
    }
  }
  return view.with_scores(std::move(normalized));
}

std::vector<GeneralizedConfusionMatrix> group_confusion_matrices(const JoinedView& view,
                                                                 const EngineOptions& engine) {
  auto cells = accumulate_cells(view, engine);
  std::vector<GeneralizedConfusionMatrix> matrices;
  matrices.reserve(cells.size());
  for (const auto& group : cells) {
    matrices.push_back(finalize_cells(group));
  }
  return matrices;
}

GeneralizedConfusionMatrix generalized_confusion_matrix(const JoinedView& view,
                                                        std::optional<std::string> group,
                                                        const EngineOptions& engine) {
  auto matrices = group_confusion_matrices(view, engine);
  if (group) {
    const auto id = static_cast<std::size_t>(view.group_id(*group));
    if (matrices[id].n == 0) {
      raise(Errc::EmptyGroup, "group '" + *group + "' has no rows");
    }
    return matrices[id];
  }
  // The whole-view matrix is the ascending-group-id fold of the per-group
  // matrices, so the group partition sums to it exactly.
  GeneralizedConfusionMatrix total;
  for (const auto& m : matrices) {
    total.exp_tp += m.exp_tp;
    total.exp_fn += m.exp_fn;
    total.exp_fp += m.exp_fp;
    total.exp_tn += m.exp_tn;
    total.positives += m.positives;
    total.negatives += m.negatives;
    total.n += m.n;
  }
  return total;
}

std::optional<double> performance_metric(const GeneralizedConfusionMatrix& gcm,
                                         PerformanceMetric metric) {
  switch (metric) {
    case PerformanceMetric::Precision: {
      const double denom = gcm.exp_tp + gcm.exp_fp;
      if (denom == 0.0) {
        return std::nullopt;
      }
      return gcm.exp_tp / denom;
    }
    case PerformanceMetric::Recall: {
      const double denom = gcm.exp_tp + gcm.exp_fn;
      if (denom == 0.0) {
        return std::nullopt;
      }
      return gcm.exp_tp / denom;
    }
    case PerformanceMetric::Fpr: {
      const double denom = gcm.exp_fp + gcm.exp_tn;
      if (denom == 0.0) {
        return std::nullopt;
      }
      return gcm.exp_fp / denom;
    }
    case PerformanceMetric::Fnr: {
      auto recall = performance_metric(gcm, PerformanceMetric::Recall);
      if (!recall) {
        return std::nullopt;
      }
      return 1.0 - *recall;
    }
    case PerformanceMetric::Accuracy:
      if (gcm.n == 0) {
        return std::nullopt;
      }
      return (gcm.exp_tp + gcm.exp_tn) / static_cast<double>(gcm.n);
    case PerformanceMetric::Auc:
      return std::nullopt;  // needs per-row scores, not a matrix
  }
  return std::nullopt;
}

std::optional<double> auc(std::span<const std::int64_t> labels, std::span<const double> scores) {
  const std::size_t n = labels.size();
  std::size_t positives = 0;
  for (auto y : labels) {
    positives += static_cast<std::size_t>(y == 1);
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    return std::nullopt;
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });

  // average ranks over tied runs; the result does not depend on tie order
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += avg_rank;
      }
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - 0.5 * p * (p + 1.0);
  return u / (p * static_cast<double>(negatives));
}

PairwiseGaps demographic_parity_predictions(const JoinedView& view, const EngineOptions& engine) {
  auto scores = view.scores();
  const auto groups = view.group_ids();
  const std::size_t group_count = view.group_count();
  auto chunks = plan_chunks(view.row_count(), engine.worker_count, engine.target_chunk_rows);

  struct Acc {
    std::vector<FixedPointSum> sums;
    std::vector<std::int64_t> counts;
  };
  Acc totals = map_reduce(
      chunks,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        Acc local{std::vector<FixedPointSum>(group_count),
                  std::vector<std::int64_t>(group_count, 0)};
        for (std::size_t r = begin; r < end; ++r) {
          const auto g = static_cast<std::size_t>(groups[r]);
          local.sums[g].add(scores[r]);
          ++local.counts[g];
        }
        return local;
      },
      [](Acc acc, Acc part) {
        for (std::size_t g = 0; g < acc.sums.size(); ++g) {
          acc.sums[g] += part.sums[g];
          acc.counts[g] += part.counts[g];
        }
        return acc;
      },
      Acc{std::vector<FixedPointSum>(group_count), std::vector<std::int64_t>(group_count, 0)});

  PairwiseGaps gaps;
  std::vector<std::pair<std::string, double>> rates;
  for (std::size_t g = 0; g < group_count; ++g) {
    if (totals.counts[g] == 0) {
      gaps.notes.push_back("group '" + view.group_names()[g] + "' has no rows; excluded");
      continue;
    }
    rates.emplace_back(view.group_names()[g],
                       totals.sums[g].value() / static_cast<double>(totals.counts[g]));
  }
  if (rates.size() < 2) {
    gaps.notes.push_back("fewer than two groups with rows; no pairs to compare");
    return gaps;
  }
  for (std::size_t a = 0; a < rates.size(); ++a) {
    for (std::size_t b = a + 1; b < rates.size(); ++b) {
      gaps.pairs.push_back(
          {{rates[a].first, rates[b].first}, std::abs(rates[a].second - rates[b].second)});
    }
  }
  return gaps;
}

EqualizedOddsResult equalized_odds(const JoinedView& view, const EngineOptions& engine) {
  auto matrices = group_confusion_matrices(view, engine);
  const auto& names = view.group_names();

  EqualizedOddsResult result;
  std::vector<std::size_t> live;
  for (std::size_t g = 0; g < matrices.size(); ++g) {
    if (matrices[g].n == 0) {
      result.notes.push_back("group '" + names[g] + "' has no rows; excluded");
    } else {
      live.push_back(g);
    }
  }
  if (live.size() < 2) {
    result.notes.push_back("fewer than two groups with rows; no pairs to compare");
    return result;
  }
  for (std::size_t a = 0; a < live.size(); ++a) {
    for (std::size_t b = a + 1; b < live.size(); ++b) {
      const auto& ma = matrices[live[a]];
      const auto& mb = matrices[live[b]];
      EqualizedOddsEntry entry;
      entry.pair = {names[live[a]], names[live[b]]};
      auto tpr_a = performance_metric(ma, PerformanceMetric::Recall);
      auto tpr_b = performance_metric(mb, PerformanceMetric::Recall);
      auto fpr_a = performance_metric(ma, PerformanceMetric::Fpr);
      auto fpr_b = performance_metric(mb, PerformanceMetric::Fpr);
      if (tpr_a && tpr_b) {
        entry.tpr_gap = std::abs(*tpr_a - *tpr_b);
      }
      if (fpr_a && fpr_b) {
        entry.fpr_gap = std::abs(*fpr_a - *fpr_b);
      }
      if (!entry.tpr_gap || !entry.fpr_gap) {
        std::string which;
        if (!entry.tpr_gap) {
          which += "TPR undefined (a group has no positives)";
        }
        if (!entry.fpr_gap) {
          if (!which.empty()) {
            which += "; ";
          }
          which += "FPR undefined (a group has no negatives)";
        }
        entry.note = which;
      }
      result.pairs.push_back(std::move(entry));
    }
  }
  return result;
}

Distribution prediction_distribution(const JoinedView& view, const std::vector<std::string>& dims,
                                     const EngineOptions& engine) {
  auto scores = view.scores();
  const auto groups = view.group_ids();

  // Reuse the attribute-dim planner from observed_distribution by counting
  // per (group, predicted label) with fractional weights, then projecting.
  const std::size_t group_count = view.group_count();
  auto chunks = plan_chunks(view.row_count(), engine.worker_count, engine.target_chunk_rows);

  using Cells = std::vector<FixedPointSum>;
  Cells totals = map_reduce(
      chunks,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        Cells local(group_count * 2);
        for (std::size_t r = begin; r < end; ++r) {
          const auto g = static_cast<std::size_t>(groups[r]);
          local[g * 2].add(1.0 - scores[r]);
          local[g * 2 + 1].add(scores[r]);
        }
        return local;
      },
      [](Cells acc, Cells part) {
        for (std::size_t i = 0; i < acc.size(); ++i) {
          acc[i] += part[i];
        }
        return acc;
      },
      Cells(group_count * 2));

  // Project group tuples onto the requested dims and merge cells that
  // coincide after projection.
  const auto& attrs = view.schema().attribute_fields;
  std::vector<std::size_t> positions;
  for (const auto& dim : dims) {
    auto it = std::find(attrs.begin(), attrs.end(), dim);
    if (it == attrs.end()) {
      raise(Errc::MissingColumn, "dimension '" + dim + "' is not a protected attribute");
    }
    positions.push_back(static_cast<std::size_t>(it - attrs.begin()));
  }
  std::map<std::vector<std::string>, double> merged;
  for (std::size_t g = 0; g < group_count; ++g) {
    std::vector<std::string> base;
    for (auto pos : positions) {
      base.push_back(view.group_tuples()[g][pos]);
    }
    for (int yhat = 0; yhat <= 1; ++yhat) {
      const double weight = totals[g * 2 + static_cast<std::size_t>(yhat)].value();
      if (weight <= 0.0) {
        continue;
      }
      auto category = base;
      category.push_back(yhat == 1 ? "1" : "0");
      merged[category] += weight;
    }
  }
  std::vector<std::pair<std::vector<std::string>, double>> counts(merged.begin(), merged.end());
  auto out_dims = dims;
  out_dims.push_back("prediction");
  return Distribution::from_counts(std::move(out_dims), std::move(counts));
}

}  // namespace fairlift

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairlift/distribution.hpp"
#include "fairlift/engine.hpp"
#include "fairlift/join.hpp"

namespace fairlift {

/// Confusion matrix built from expected counts: each row contributes its
/// score s to the positive side and 1-s to the negative side, so no
/// classification threshold is needed. At hard scores (s in {0,1}) the cells
/// equal classical counts exactly.
struct GeneralizedConfusionMatrix {
  double exp_tp = 0.0;
  double exp_fp = 0.0;
  double exp_tn = 0.0;
  double exp_fn = 0.0;
  std::int64_t n = 0;
  std::int64_t positives = 0;  // count(label == 1) == exp_tp + exp_fn
  std::int64_t negatives = 0;

  double prevalence() const { return n == 0 ? 0.0 : static_cast<double>(positives) / n; }
};

enum class PerformanceMetric { Precision, Recall, Fpr, Fnr, Accuracy, Auc };

std::optional<PerformanceMetric> performance_metric_from_token(const std::string& token);
const char* performance_metric_token(PerformanceMetric metric);

/// RAW scores pass through the logistic sigmoid; PROB scores are validated to
/// [0,1] (ScoreOutOfRange otherwise). Returns a view sharing every column but
/// the scores.
JoinedView normalize_scores(const JoinedView& view, ScoreType score_type);

/// Expected-count confusion matrix per group, accumulated chunk-parallel with
/// a summing reducer. Indexed by group id.
std::vector<GeneralizedConfusionMatrix> group_confusion_matrices(const JoinedView& view,
                                                                 const EngineOptions& engine = {});

/// Matrix over the whole view, or over one group when a filter is given.
/// The unfiltered matrix is defined as the ascending-group-id fold of the
/// per-group matrices, so the group partition sums to it exactly. Throws
/// EmptyGroup when the filter matches nothing.
GeneralizedConfusionMatrix generalized_confusion_matrix(
    const JoinedView& view, std::optional<std::string> group = std::nullopt,
    const EngineOptions& engine = {});

/// PRECISION = TP/(TP+FP), RECALL = TP/(TP+FN), FPR = FP/(FP+TN),
/// FNR = 1-RECALL, ACCURACY = (TP+TN)/n, over expected counts. Returns
/// nullopt on a zero denominator (reported as null downstream, never NaN).
std::optional<double> performance_metric(const GeneralizedConfusionMatrix& gcm,
                                         PerformanceMetric metric);

/// Probability that a uniformly random positive outscores a uniformly random
/// negative, ties counted 0.5 (rank / Mann-Whitney formulation). Returns
/// nullopt when either class is absent.
std::optional<double> auc(std::span<const std::int64_t> labels, std::span<const double> scores);

/// |P(Yhat=1|G=g1) - P(Yhat=1|G=g2)| per unordered pair, where the positive
/// rate of a group is its mean score (expected-value convention).
PairwiseGaps demographic_parity_predictions(const JoinedView& view,
                                            const EngineOptions& engine = {});

struct EqualizedOddsEntry {
  GroupPair pair;
  std::optional<double> tpr_gap;  // y = 1
  std::optional<double> fpr_gap;  // y = 0
  std::string note;               // reason when a gap is undefined
};

struct EqualizedOddsResult {
  std::vector<EqualizedOddsEntry> pairs;
  std::vector<std::string> notes;
};

/// delta_EO(y,g1,g2) = |P(Yhat=1|Y=y,G=g1) - P(Yhat=1|Y=y,G=g2)| from the
/// per-group generalized confusion matrices (y=1: TPR gap, y=0: FPR gap).
EqualizedOddsResult equalized_odds(const JoinedView& view, const EngineOptions& engine = {});

/// Expected distribution over (dims..., predicted label): each row adds
/// weight s to (tuple, "1") and 1-s to (tuple, "0"). The label-free analogue
/// of observed_distribution for the post-training stage.
Distribution prediction_distribution(const JoinedView& view, const std::vector<std::string>& dims,
                                     const EngineOptions& engine = {});

}  // namespace fairlift

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairlift/engine.hpp"
#include "fairlift/join.hpp"
#include "fairlift/model_metrics.hpp"

namespace fairlift {

/// Group -> benefit value, the per-group vector an inequality index
/// aggregates. Entries are sorted by group name.
struct BenefitMap {
  std::string metric_source;
  std::vector<std::pair<std::string, double>> entries;
  std::vector<std::string> excluded;  // groups whose metric was undefined

  double mean() const;
  std::vector<double> values() const;
};

enum class IndexKind { GeneralizedEntropy, TheilL, TheilT };

struct InequalityIndex {
  IndexKind kind;
  double alpha = 0.0;  // meaningful for GeneralizedEntropy only
  double value = 0.0;
};

/// One entry per group carrying that group's performance metric; groups with
/// an undefined metric are excluded and reported. Throws AllGroupsUndefined
/// when nothing remains.
BenefitMap build_benefit_vector(const JoinedView& view, PerformanceMetric metric,
                                const EngineOptions& engine = {});

/// Benefit map assembled from per-group values already computed elsewhere
/// (nullopt entries are excluded and reported).
BenefitMap benefit_map_from_values(const std::string& metric_source,
                                   const std::vector<std::string>& group_names,
                                   const std::vector<std::optional<double>>& values);

/// GE(alpha) = 1/(n*alpha*(alpha-1)) * sum((b/mu)^alpha - 1), unweighted.
/// alpha in {0,1} is InvalidAlpha (use the Theil ops); mu <= 0 is
/// NonpositiveMean.
InequalityIndex generalized_entropy_index(const BenefitMap& benefits, double alpha);

/// Theil T = (1/n) sum (b/mu) ln(b/mu), the alpha->1 limit of GE.
/// Zero benefits are excluded with a warning note appended to *warnings;
/// negative benefits are NonpositiveBenefit.
InequalityIndex theil_t(const BenefitMap& benefits, std::vector<std::string>* warnings = nullptr);

/// Theil L = (1/n) sum ln(mu/b), the alpha->0 limit of GE.
InequalityIndex theil_l(const BenefitMap& benefits, std::vector<std::string>* warnings = nullptr);

}  // namespace fairlift

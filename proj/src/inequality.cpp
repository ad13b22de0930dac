#include "fairlift/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairlift {

double BenefitMap::mean() const {
  if (entries.empty()) {
    raise(Errc::AllGroupsUndefined, "benefit map is empty");
  }
  double sum = 0.0;
  for (const auto& [group, benefit] : entries) {
    sum += benefit;
  }
  return sum / static_cast<double>(entries.size());
}

std::vector<double> BenefitMap::values() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& [group, benefit] : entries) {
    out.push_back(benefit);
  }
  return out;
}

BenefitMap build_benefit_vector(const JoinedView& view, PerformanceMetric metric,
                                const EngineOptions& engine) {
  BenefitMap benefits;
  benefits.metric_source = performance_metric_token(metric);

  if (metric == PerformanceMetric::Auc) {
    auto labels = view.labels();
    auto scores = view.scores();
    for (std::size_t g = 0; g < view.group_count(); ++g) {
      const auto& rows = view.group_rows(static_cast<std::int32_t>(g));
      std::vector<std::int64_t> group_labels;
      std::vector<double> group_scores;
      group_labels.reserve(rows.size());
      group_scores.reserve(rows.size());
      for (auto r : rows) {
        group_labels.push_back(labels[r]);
        group_scores.push_back(scores[r]);
      }
      auto value = auc(group_labels, group_scores);
      if (value) {
        benefits.entries.emplace_back(view.group_names()[g], *value);
      } else {
        benefits.excluded.push_back(view.group_names()[g]);
      }
    }
  } else {
    auto matrices = group_confusion_matrices(view, engine);
    for (std::size_t g = 0; g < matrices.size(); ++g) {
      auto value = performance_metric(matrices[g], metric);
      if (value) {
        benefits.entries.emplace_back(view.group_names()[g], *value);
      } else {
        benefits.excluded.push_back(view.group_names()[g]);
      }
    }
  }
  if (benefits.entries.empty()) {
    raise(Errc::AllGroupsUndefined,
          std::string("metric ") + benefits.metric_source + " undefined for every group");
  }
  return benefits;
}

BenefitMap benefit_map_from_values(const std::string& metric_source,
                                   const std::vector<std::string>& group_names,
                                   const std::vector<std::optional<double>>& values) {
  BenefitMap benefits;
  benefits.metric_source = metric_source;
  for (std::size_t g = 0; g < group_names.size(); ++g) {
    if (values[g]) {
      benefits.entries.emplace_back(group_names[g], *values[g]);
    } else {
      benefits.excluded.push_back(group_names[g]);
    }
  }
  if (benefits.entries.empty()) {
    raise(Errc::AllGroupsUndefined, "metric " + metric_source + " undefined for every group");
  }
  return benefits;
}

InequalityIndex generalized_entropy_index(const BenefitMap& benefits, double alpha) {
  if (alpha == 0.0 || alpha == 1.0) {
    raise(Errc::InvalidAlpha, "alpha in {0,1}; use the Theil L/T operations");
  }
  const double mu = benefits.mean();
  if (!(mu > 0.0)) {
    raise(Errc::NonpositiveMean, "benefit mean " + std::to_string(mu) + " is not positive");
  }
  const auto values = benefits.values();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double b : values) {
    sum += std::pow(b / mu, alpha) - 1.0;
  }
  return {IndexKind::GeneralizedEntropy, alpha, sum / (n * alpha * (alpha - 1.0))};
}

namespace {

// Theil indices need strictly positive benefits; zero entries are excluded
// with a warning rather than collapsing the index to an infinity.
std::vector<double> positive_values(const BenefitMap& benefits, const char* which,
                                    std::vector<std::string>* warnings) {
  std::vector<double> values;
  for (const auto& [group, benefit] : benefits.entries) {
    if (benefit < 0.0) {
      raise(Errc::NonpositiveBenefit,
            "group '" + group + "' has negative benefit " + std::to_string(benefit));
    }
    if (benefit == 0.0) {
      if (warnings != nullptr) {
        warnings->push_back(std::string(which) + ": group '" + group +
                            "' has zero benefit; excluded");
      }
      continue;
    }
    values.push_back(benefit);
  }
  if (values.empty()) {
    raise(Errc::NonpositiveBenefit, "no positive benefits remain");
  }
  return values;
}

}  // namespace

InequalityIndex theil_t(const BenefitMap& benefits, std::vector<std::string>* warnings) {
  auto values = positive_values(benefits, "THEIL_T_INDEX", warnings);
  const double n = static_cast<double>(values.size());
  const double mu = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sum = 0.0;
  for (double b : values) {
    const double ratio = b / mu;
    sum += ratio * std::log(ratio);
  }
  return {IndexKind::TheilT, 1.0, sum / n};
}

InequalityIndex theil_l(const BenefitMap& benefits, std::vector<std::string>* warnings) {
  auto values = positive_values(benefits, "THEIL_L_INDEX", warnings);
  const double n = static_cast<double>(values.size());
  const double mu = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sum = 0.0;
  for (double b : values) {
    sum += std::log(mu / b);
  }
  return {IndexKind::TheilL, 0.0, sum / n};
}

}  // namespace fairlift

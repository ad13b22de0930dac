#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "fairlift/distribution.hpp"
#include "fairlift/inequality.hpp"
#include "fairlift/permutation.hpp"

namespace fairlift {

// Built-in tokens, exactly as they appear in configuration documents.
inline constexpr const char* kKlDivergence = "KL_DIVERGENCE";
inline constexpr const char* kJsDivergence = "JS_DIVERGENCE";
inline constexpr const char* kTotalVarDist = "TOTAL_VAR_DIST";
inline constexpr const char* kInfNormDist = "INF_NORM_DIST";
inline constexpr const char* kDemographicParity = "DEMOGRAPHIC_PARITY";
inline constexpr const char* kEqualizedOdds = "EQUALIZED_ODDS";
inline constexpr const char* kGeneralizedEntropyIndex = "GENERALIZED_ENTROPY_INDEX";
inline constexpr const char* kTheilLIndex = "THEIL_L_INDEX";
inline constexpr const char* kTheilTIndex = "THEIL_T_INDEX";

/// User-defined metric plugged into the toolkit under its own token. The
/// evaluator matching `kind` must be set; the token then becomes usable in
/// the corresponding config list (distanceMetrics for onDistribution,
/// overallMetrics for onBenefitMap, performanceBenefitMetrics and
/// permutation tests for onRows).
struct CustomMetricSpec {
  enum class Kind { OnDistribution, OnBenefitMap, OnRows };

  std::string name;
  Kind kind = Kind::OnRows;
  std::function<double(const Distribution&, const Distribution&)> on_distribution;
  std::function<double(const BenefitMap&)> on_benefit_map;
  RowStatistic on_rows;
};

class MetricRegistry {
 public:
  /// Registers `spec` and returns its token. Throws DuplicateToken if the
  /// name collides with a built-in or an earlier registration.
  std::string register_custom(CustomMetricSpec spec);

  const CustomMetricSpec* find_custom(const std::string& name) const;

  bool valid_distance_token(const std::string& name) const;
  bool valid_performance_token(const std::string& name) const;
  bool valid_overall_token(const std::string& name) const;

 private:
  std::map<std::string, CustomMetricSpec> custom_;
};

}  // namespace fairlift

#include "fairlift/registry.hpp"

#include <array>

namespace fairlift {

namespace {

constexpr std::array kDistanceTokens = {kKlDivergence,       kJsDivergence, kTotalVarDist,
                                        kInfNormDist,        kDemographicParity,
                                        kEqualizedOdds};
constexpr std::array kPerformanceTokens = {"PRECISION", "RECALL", "FPR",
                                           "FNR",       "ACCURACY", "AUC"};
constexpr std::array kOverallTokens = {kGeneralizedEntropyIndex, kTheilLIndex, kTheilTIndex};

template <typename Tokens>
bool contains(const Tokens& tokens, const std::string& name) {
  for (const auto* token : tokens) {
    if (name == token) {
      return true;
    }
  }
  return false;
}

bool is_builtin(const std::string& name) {
  return contains(kDistanceTokens, name) || contains(kPerformanceTokens, name) ||
         contains(kOverallTokens, name);
}

}  // namespace

std::string MetricRegistry::register_custom(CustomMetricSpec spec) {
  if (spec.name.empty()) {
    raise(Errc::InvalidArgument, "custom metric needs a name");
  }
  if (is_builtin(spec.name)) {
    raise(Errc::DuplicateToken, "'" + spec.name + "' collides with a built-in token");
  }
  const bool has_evaluator =
      (spec.kind == CustomMetricSpec::Kind::OnDistribution && spec.on_distribution) ||
      (spec.kind == CustomMetricSpec::Kind::OnBenefitMap && spec.on_benefit_map) ||
      (spec.kind == CustomMetricSpec::Kind::OnRows && spec.on_rows);
  if (!has_evaluator) {
    raise(Errc::InvalidArgument, "custom metric '" + spec.name + "' lacks an evaluator for its kind");
  }
  std::string name = spec.name;
  if (!custom_.emplace(name, std::move(spec)).second) {
    raise(Errc::DuplicateToken, "'" + name + "' is already registered");
  }
  return name;
}

const CustomMetricSpec* MetricRegistry::find_custom(const std::string& name) const {
  auto it = custom_.find(name);
  return it == custom_.end() ? nullptr : &it->second;
}

bool MetricRegistry::valid_distance_token(const std::string& name) const {
  if (contains(kDistanceTokens, name)) {
    return true;
  }
  const auto* spec = find_custom(name);
  return spec != nullptr && spec->kind == CustomMetricSpec::Kind::OnDistribution;
}

bool MetricRegistry::valid_performance_token(const std::string& name) const {
  if (contains(kPerformanceTokens, name)) {
    return true;
  }
  const auto* spec = find_custom(name);
  return spec != nullptr && spec->kind == CustomMetricSpec::Kind::OnRows;
}

bool MetricRegistry::valid_overall_token(const std::string& name) const {
  if (contains(kOverallTokens, name)) {
    return true;
  }
  const auto* spec = find_custom(name);
  return spec != nullptr && spec->kind == CustomMetricSpec::Kind::OnBenefitMap;
}

}  // namespace fairlift

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairlift/distribution.hpp"
#include "fairlift/engine.hpp"
#include "fairlift/registry.hpp"
#include "fairlift/schema.hpp"

namespace fairlift {

struct OverallMetricSpec {
  std::string token;
  std::optional<double> alpha;  // parameter following '=' or ':'

  std::string display() const;
  bool operator==(const OverallMetricSpec&) const = default;
};

struct PermutationTestConfig {
  std::vector<std::string> metrics;
  int num_permutations = 1000;
  std::size_t sample_size = 100000;
  std::optional<std::uint64_t> seed;  // defaults to the engine seed

  bool operator==(const PermutationTestConfig&) const = default;
};

/// Validated pipeline configuration. Field names mirror the configuration
/// keys one to one.
struct Config {
  std::string dataset_path;
  std::string protected_dataset_path;
  std::string output_path;
  std::string uid_field;
  std::string uid_protected_attribute_field;
  std::vector<std::string> protected_attribute_fields;
  std::optional<std::string> label_field;
  std::optional<std::string> score_field;
  std::optional<ScoreType> score_type;
  std::optional<Format> dataset_format;            // inferred from extension when absent
  std::optional<Format> protected_dataset_format;  //
  std::vector<std::string> distance_metrics;
  std::vector<std::string> performance_benefit_metrics;
  std::vector<OverallMetricSpec> overall_metrics;
  ReferenceSpec reference_distribution;
  EngineOptions engine;
  std::optional<PermutationTestConfig> permutation_test;

  Schema data_schema() const;
  Schema protected_schema() const;

  bool operator==(const Config&) const = default;
};

// --- raw document layer ------------------------------------------------------
//
// The configuration language is a flat key-value document. Keys may be bare
// or quoted; values are quoted strings (possibly spanning lines), bare
// scalars, or bracketed lists whose items are scalars or 'TOKEN': 'param'
// pairs. Comma-joined token strings ("A,B,C") and TOKEN=param entries are
// expanded at the list layer. '//' starts a comment outside quotes.

struct ConfigItem {
  std::string token;
  std::optional<std::string> param;

  bool operator==(const ConfigItem&) const = default;
};

struct ConfigValue {
  enum class Kind { Scalar, List };
  Kind kind = Kind::Scalar;
  std::string scalar;
  std::vector<ConfigItem> list;
};

struct ParsedDocument {
  std::vector<std::pair<std::string, ConfigValue>> entries;

  const ConfigValue* find(const std::string& key) const;
};

/// Throws ConfigSyntax with line/column on malformed input.
ParsedDocument parse_document(const std::string& text);

/// Items of a list-valued or comma-joined scalar value.
std::vector<ConfigItem> metric_items(const ConfigValue& value);

// --- validated layer ---------------------------------------------------------

/// Parses and validates a configuration document. Unknown metric tokens and
/// missing required keys are errors here, not at run time.
Config parse_config(const std::string& text, const MetricRegistry& registry = {});

Config load_config(const std::string& path, const MetricRegistry& registry = {});

/// Canonical document form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const Config& config);

}  // namespace fairlift

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fairlift {

enum class Format { Csv, Jsonl };

/// PROB scores must already lie in [0,1]; RAW scores are mapped through the
/// logistic sigmoid before use.
enum class ScoreType { Prob, Raw };

/// Declares which columns of an input file play which role. Only declared
/// columns are loaded.
struct Schema {
  std::string uid_field;
  std::optional<std::string> label_field;
  std::optional<std::string> score_field;
  std::vector<std::string> attribute_fields;

  /// Throws InvalidArgument unless uidField is non-empty and distinct from
  /// every attribute field.
  void validate() const;

  std::vector<std::string> declared_columns() const;

  bool operator==(const Schema&) const = default;
};

}  // namespace fairlift

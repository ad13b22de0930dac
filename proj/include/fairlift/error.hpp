#pragma once

#include <stdexcept>
#include <string>

namespace fairlift {

enum class Errc {
  MissingColumn,
  TypeCoercion,
  EmptyInput,
  DuplicateProtectedKey,
  DisjointKeys,
  EmptyProjection,
  OutOfMemoryBudget,
  ScoreOutOfRange,
  EmptyGroup,
  SingleClassGroup,
  InvalidAlpha,
  NonpositiveMean,
  NonpositiveBenefit,
  DegenerateGroup,
  AllGroupsUndefined,
  UndefinedMetric,
  InvalidOrder,
  ConfigSyntax,
  UnknownMetricToken,
  MissingRequiredKey,
  DuplicateToken,
  IoError,
  InvalidArgument,
};

const char* errc_name(Errc code);

/// All library failures are thrown as Error; code() identifies the condition
/// so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fairlift

#include "fairlift/error.hpp"

namespace fairlift {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MissingColumn:
      return "MissingColumn";
    case Errc::TypeCoercion:
      return "TypeCoercion";
    case Errc::EmptyInput:
      return "EmptyInput";
    case Errc::DuplicateProtectedKey:
      return "DuplicateProtectedKey";
    case Errc::DisjointKeys:
      return "DisjointKeys";
    case Errc::EmptyProjection:
      return "EmptyProjection";
    case Errc::OutOfMemoryBudget:
      return "OutOfMemoryBudget";
    case Errc::ScoreOutOfRange:
      return "ScoreOutOfRange";
    case Errc::EmptyGroup:
      return "EmptyGroup";
    case Errc::SingleClassGroup:
      return "SingleClassGroup";
    case Errc::InvalidAlpha:
      return "InvalidAlpha";
    case Errc::NonpositiveMean:
      return "NonpositiveMean";
    case Errc::NonpositiveBenefit:
      return "NonpositiveBenefit";
    case Errc::DegenerateGroup:
      return "DegenerateGroup";
    case Errc::AllGroupsUndefined:
      return "AllGroupsUndefined";
    case Errc::UndefinedMetric:
      return "UndefinedMetric";
    case Errc::InvalidOrder:
      return "InvalidOrder";
    case Errc::ConfigSyntax:
      return "ConfigSyntax";
    case Errc::UnknownMetricToken:
      return "UnknownMetricToken";
    case Errc::MissingRequiredKey:
      return "MissingRequiredKey";
    case Errc::DuplicateToken:
      return "DuplicateToken";
    case Errc::IoError:
      return "IoError";
    case Errc::InvalidArgument:
      return "InvalidArgument";
  }
  return "Error";
}

}  // namespace fairlift

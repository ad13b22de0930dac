#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "fairlift/config.hpp"
#include "fairlift/permutation.hpp"

namespace fairlift {

/// Reports are JSON documents with stable key ordering. Every configured
/// metric appears exactly once, either as {"value": <number>} or as
/// {"value": null, "reason": <string>}; NaN or Infinity never appear as
/// value tokens. No timestamp is emitted, so identical runs produce
/// byte-identical files.
using ReportDoc = nlohmann::ordered_json;

struct FairnessReport {
  ReportDoc doc;

  std::string dump() const { return doc.dump(2) + "\n"; }
};

/// {"value": v} or {"value": null, "reason": reason}. Non-finite v is
/// reported as null with a reason naming the sentinel.
ReportDoc metric_value(std::optional<double> value, const std::string& reason = "");

ReportDoc to_json(const PermutationTestResult& result);

/// UTF-8 JSON with stable ordering. Throws IoError when the path cannot be
/// written.
void write_report(const FairnessReport& report, const std::string& path);

FairnessReport read_report(const std::string& path);

}  // namespace fairlift

#include "fairlift/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fairlift {

ReportDoc metric_value(std::optional<double> value, const std::string& reason) {
  ReportDoc entry;
  if (value && std::isfinite(*value)) {
    entry["value"] = *value;
    return entry;
  }
  entry["value"] = nullptr;
  if (value && std::isinf(*value)) {
    entry["reason"] = reason.empty() ? (*value > 0 ? "+infinity" : "-infinity") : reason;
  } else if (value && std::isnan(*value)) {
    entry["reason"] = reason.empty() ? "not a number" : reason;
  } else {
    entry["reason"] = reason.empty() ? "undefined" : reason;
  }
  return entry;
}

ReportDoc to_json(const PermutationTestResult& result) {
  ReportDoc doc;
  doc["metric"] = result.metric;
  doc["group1"] = result.group_pair.g1;
  doc["group2"] = result.group_pair.g2;
  doc["observedDiff"] = result.observed_diff;
  doc["pValue"] = result.p_value;
  doc["numPermutations"] = result.num_permutations;
  doc["skippedTrials"] = result.skipped_trials;
  doc["sampleSizeGroup1"] = result.n1;
  doc["sampleSizeGroup2"] = result.n2;
  doc["seed"] = result.seed;
  return doc;
}

void write_report(const FairnessReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(Errc::IoError, "cannot write report to '" + path + "'");
  }
  out << report.dump();
  out.flush();
  if (!out) {
    raise(Errc::IoError, "failed while writing report to '" + path + "'");
  }
}

FairnessReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::IoError, "cannot open report '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto doc = ReportDoc::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) {
    raise(Errc::IoError, "report '" + path + "' is not valid JSON");
  }
  return FairnessReport{std::move(doc)};
}

}  // namespace fairlift

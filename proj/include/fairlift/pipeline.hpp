#pragma once

#include <memory>
#include <string>

#include "fairlift/config.hpp"
#include "fairlift/engine.hpp"
#include "fairlift/registry.hpp"
#include "fairlift/report.hpp"

namespace fairlift {

/// Orchestrates one end-to-end run: load -> join -> normalize scores ->
/// cache -> dataset metrics -> model metrics -> permutation tests -> report.
/// The view is loaded once and reused by every stage until invalidated.
/// Parallelism lives entirely inside the engine calls; one Pipeline owns one
/// engine configuration and is not shared across threads.
class Pipeline {
 public:
  explicit Pipeline(Config config, std::shared_ptr<const MetricRegistry> registry = nullptr);

  const Config& config() const { return config_; }

  /// Materializes (or returns the cached) joined view. Counts loads for
  /// cache instrumentation.
  const JoinedView& view();
  void invalidate_view();
  int load_count() const { return load_count_; }

  /// Pre-training stage: observed distributions, configured divergences vs
  /// the reference, demographic parity on labels.
  ReportDoc compute_dataset_metrics();

  /// Post-training stage: per-group confusion matrices and performance
  /// metrics, prediction-side distances, equalized odds, benefit vectors
  /// with inequality indices, permutation tests.
  ReportDoc compute_model_performance_metrics();

  /// Both stages plus summary and provenance; writes the report to
  /// config.output_path (unless write_output is false) and returns it.
  FairnessReport run(bool write_output = true);

 private:
  Config config_;
  std::shared_ptr<const MetricRegistry> registry_;
  CacheManager cache_;
  CachedHandle handle_;
  int load_count_ = 0;
};

// Spec-level entry points; each constructs a Pipeline around the config.
FairnessReport run_pipeline(const Config& config,
                            std::shared_ptr<const MetricRegistry> registry = nullptr);
ReportDoc compute_dataset_metrics(const Config& config,
                                  std::shared_ptr<const MetricRegistry> registry = nullptr);
ReportDoc compute_model_performance_metrics(
    const Config& config, std::shared_ptr<const MetricRegistry> registry = nullptr);

}  // namespace fairlift

#include "fairlift/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "fairlift/inequality.hpp"
#include "fairlift/io.hpp"
#include "fairlift/model_metrics.hpp"
#include "fairlift/version.hpp"

namespace fairlift {

namespace {

std::string pair_key(const GroupPair& pair) { return pair.g1 + "|" + pair.g2; }

ReportDoc gaps_to_json(const PairwiseGaps& gaps, std::vector<std::string>* warnings) {
  ReportDoc doc = ReportDoc::object();
  for (const auto& [pair, value] : gaps.pairs) {
    doc[pair_key(pair)] = metric_value(value);
  }
  for (const auto& note : gaps.notes) {
    if (warnings != nullptr) {
      warnings->push_back(note);
    }
  }
  if (gaps.pairs.empty()) {
    return metric_value(std::nullopt, "no group pairs to compare");
  }
  return doc;
}

/// Scalar distance between observed and reference, by token. KL direction:
/// divergence of the observed distribution from the desired reference.
std::optional<ReportDoc> scalar_distance(const std::string& token, const Distribution& observed,
                                         const Distribution& reference,
                                         const MetricRegistry& registry,
                                         std::vector<std::string>* warnings,
                                         const std::string& stage) {
  if (token == kKlDivergence) {
    const double kl = kl_divergence(observed, reference);
    if (std::isinf(kl)) {
      if (warnings != nullptr) {
        warnings->push_back("KL_DIVERGENCE (" + stage +
                            ") is +infinity: reference has zero mass on an observed category");
      }
      return metric_value(kl, "+infinity: reference has zero mass on an observed category");
    }
    return metric_value(kl);
  }
  if (token == kJsDivergence) {
    return metric_value(js_divergence(observed, reference));
  }
  if (token == kTotalVarDist) {
    return metric_value(total_variation(observed, reference));
  }
  if (token == kInfNormDist) {
    return metric_value(lp_distance(observed, reference,
                                    std::numeric_limits<double>::infinity()));
  }
  const auto* custom = registry.find_custom(token);
  if (custom != nullptr && custom->kind == CustomMetricSpec::Kind::OnDistribution) {
    return metric_value(custom->on_distribution(observed, reference));
  }
  return std::nullopt;
}

ReportDoc eo_to_json(const EqualizedOddsResult& eo, std::vector<std::string>* warnings) {
  ReportDoc y1 = ReportDoc::object();
  ReportDoc y0 = ReportDoc::object();
  for (const auto& entry : eo.pairs) {
    y1[pair_key(entry.pair)] = metric_value(entry.tpr_gap, entry.note);
    y0[pair_key(entry.pair)] = metric_value(entry.fpr_gap, entry.note);
  }
  for (const auto& note : eo.notes) {
    if (warnings != nullptr) {
      warnings->push_back(note);
    }
  }
  ReportDoc doc;
  if (eo.pairs.empty()) {
    doc["y=1"] = metric_value(std::nullopt, "no group pairs to compare");
    doc["y=0"] = metric_value(std::nullopt, "no group pairs to compare");
  } else {
    doc["y=1"] = std::move(y1);
    doc["y=0"] = std::move(y0);
  }
  return doc;
}

ReportDoc summary_json(const Config& config, const JoinedView& view) {
  ReportDoc summary;
  summary["rowCount"] = view.row_count();
  summary["matchedRows"] = view.matched_rows();
  summary["droppedRows"] = view.dropped_rows();
  summary["protectedAttributes"] = config.protected_attribute_fields;
  ReportDoc groups = ReportDoc::object();
  for (std::size_t g = 0; g < view.group_count(); ++g) {
    groups[view.group_names()[g]] = view.group_rows(static_cast<std::int32_t>(g)).size();
  }
  summary["groups"] = std::move(groups);
  return summary;
}

ReportDoc provenance_json(const Config& config) {
  // Semantic configuration only: execution knobs (workerCount, chunk rows,
  // cache budget) do not influence results and are omitted so that reports
  // are byte-identical across worker counts.
  ReportDoc echo;
  echo["datasetPath"] = config.dataset_path;
  echo["uidField"] = config.uid_field;
  if (config.label_field) {
    echo["labelField"] = *config.label_field;
  }
  if (config.score_field) {
    echo["scoreField"] = *config.score_field;
    echo["scoreType"] = config.score_type == ScoreType::Raw ? "RAW" : "PROB";
  }
  echo["protectedAttributeField"] = config.protected_attribute_fields;
  echo["uidProtectedAttributeField"] = config.uid_protected_attribute_field;
  echo["protectedDatasetPath"] = config.protected_dataset_path;
  echo["outputPath"] = config.output_path;
  echo["distanceMetrics"] = config.distance_metrics;
  echo["performanceBenefitMetrics"] = config.performance_benefit_metrics;
  {
    std::vector<std::string> overall;
    overall.reserve(config.overall_metrics.size());
    for (const auto& spec : config.overall_metrics) {
      overall.push_back(spec.display());
    }
    echo["overallMetrics"] = overall;
  }
  if (config.reference_distribution.kind == ReferenceSpec::Kind::Uniform) {
    echo["referenceDistribution"] = "UNIFORM";
  } else {
    ReportDoc mass = ReportDoc::object();
    for (const auto& [category, probability] : config.reference_distribution.explicit_mass) {
      mass[category] = probability;
    }
    echo["referenceDistribution"] = std::move(mass);
  }
  if (config.permutation_test) {
    ReportDoc pt;
    pt["metrics"] = config.permutation_test->metrics;
    pt["numPermutations"] = config.permutation_test->num_permutations;
    pt["sampleSize"] = config.permutation_test->sample_size;
    pt["seed"] = config.permutation_test->seed.value_or(config.engine.seed);
    echo["permutationTest"] = std::move(pt);
  }

  ReportDoc provenance;
  provenance["version"] = kVersion;
  provenance["seed"] = config.engine.seed;
  provenance["config"] = std::move(echo);
  return provenance;
}

/// Per-group values of one performance token: built-ins from the matrices,
/// AUC from per-group rows, custom onRows metrics from their evaluator.
std::vector<std::optional<double>> per_group_values(
    const std::string& token, const JoinedView& view,
    const std::vector<GeneralizedConfusionMatrix>& matrices, const MetricRegistry& registry,
    std::vector<std::string>* reasons) {
  const std::size_t group_count = view.group_count();
  std::vector<std::optional<double>> values(group_count);
  std::vector<std::string> why(group_count);

  auto metric = performance_metric_from_token(token);
  if (metric && *metric != PerformanceMetric::Auc) {
    const bool labeled = view.has_labels();
    for (std::size_t g = 0; g < group_count; ++g) {
      if (!labeled) {
        why[g] = "requires a label field";
        continue;
      }
      values[g] = performance_metric(matrices[g], *metric);
      if (!values[g]) {
        why[g] = "zero denominator";
      }
    }
  } else if (metric && *metric == PerformanceMetric::Auc) {
    const bool labeled = view.has_labels();
    auto labels = labeled ? view.labels() : std::span<const std::int64_t>{};
    auto scores = view.scores();
    for (std::size_t g = 0; g < group_count; ++g) {
      if (!labeled) {
        why[g] = "requires a label field";
        continue;
      }
      const auto& rows = view.group_rows(static_cast<std::int32_t>(g));
      std::vector<std::int64_t> group_labels;
      std::vector<double> group_scores;
      group_labels.reserve(rows.size());
      group_scores.reserve(rows.size());
      for (auto r : rows) {
        group_labels.push_back(labels[r]);
        group_scores.push_back(scores[r]);
      }
      values[g] = auc(group_labels, group_scores);
      if (!values[g]) {
        why[g] = "single-class group";
      }
    }
  } else {
    const auto* custom = registry.find_custom(token);
    if (custom == nullptr || custom->kind != CustomMetricSpec::Kind::OnRows) {
      raise(Errc::UnknownMetricToken, "'" + token + "' is not a performance metric");
    }
    const bool labeled = view.has_labels();
    auto labels = labeled ? view.labels() : std::span<const std::int64_t>{};
    auto scores = view.scores();
    for (std::size_t g = 0; g < group_count; ++g) {
      const auto& rows = view.group_rows(static_cast<std::int32_t>(g));
      std::vector<LabeledScore> group_rows;
      group_rows.reserve(rows.size());
      for (auto r : rows) {
        group_rows.push_back({labeled ? labels[r] : -1, scores[r]});
      }
      values[g] = custom->on_rows(group_rows);
      if (!values[g]) {
        why[g] = "custom metric undefined on group";
      }
    }
  }
  if (reasons != nullptr) {
    *reasons = std::move(why);
  }
  return values;
}

ReportDoc overall_index_json(const OverallMetricSpec& spec, const BenefitMap& benefits,
                             const MetricRegistry& registry,
                             std::vector<std::string>* warnings) {
  try {
    if (spec.token == kGeneralizedEntropyIndex) {
      return metric_value(generalized_entropy_index(benefits, spec.alpha.value()).value);
    }
    if (spec.token == kTheilTIndex) {
      return metric_value(theil_t(benefits, warnings).value);
    }
    if (spec.token == kTheilLIndex) {
      return metric_value(theil_l(benefits, warnings).value);
    }
    const auto* custom = registry.find_custom(spec.token);
    if (custom != nullptr && custom->kind == CustomMetricSpec::Kind::OnBenefitMap) {
      return metric_value(custom->on_benefit_map(benefits));
    }
    raise(Errc::UnknownMetricToken, "'" + spec.token + "' is not an overall metric");
  } catch (const Error& error) {
    if (error.code() == Errc::UnknownMetricToken) {
      throw;
    }
    return metric_value(std::nullopt, error.what());
  }
}

}  // namespace

Pipeline::Pipeline(Config config, std::shared_ptr<const MetricRegistry> registry)
    : config_(std::move(config)),
      registry_(registry ? std::move(registry) : std::make_shared<const MetricRegistry>()),
      cache_(config_.engine.cache_budget_bytes) {}

const JoinedView& Pipeline::view() {
  if (handle_.valid()) {
    return handle_.view();
  }
  ++load_count_;
  Format data_format =
      config_.dataset_format ? *config_.dataset_format : format_from_path(config_.dataset_path);
  Format protected_format = config_.protected_dataset_format
                                ? *config_.protected_dataset_format
                                : format_from_path(config_.protected_dataset_path);
  ColumnarTable data = load_table(config_.dataset_path, config_.data_schema(), data_format);
  ColumnarTable protected_table =
      load_table(config_.protected_dataset_path, config_.protected_schema(), protected_format);
  JoinedView joined =
      join_protected(data, config_.data_schema(), protected_table, config_.uid_field,
                     config_.uid_protected_attribute_field, config_.protected_attribute_fields);
  if (config_.score_field) {
    joined = normalize_scores(joined, config_.score_type.value_or(ScoreType::Prob));
  }
  handle_ = cache_.put(std::move(joined));
  return handle_.view();
}

void Pipeline::invalidate_view() { cache_.invalidate(handle_); }

ReportDoc Pipeline::compute_dataset_metrics() {
  if (!config_.label_field) {
    raise(Errc::MissingColumn, "dataset metrics need a label field");
  }
  const JoinedView& v = view();
  std::vector<std::string> warnings;

  std::vector<std::string> dims = config_.protected_attribute_fields;
  dims.push_back(*config_.label_field);
  Distribution observed = observed_distribution(v, dims, config_.engine);
  Distribution reference = config_.reference_distribution.materialize(observed);

  ReportDoc distances = ReportDoc::object();
  for (const auto& token : config_.distance_metrics) {
    if (auto scalar = scalar_distance(token, observed, reference, *registry_, &warnings,
                                      "labels")) {
      distances[token]["labels"] = std::move(*scalar);
    } else if (token == kDemographicParity) {
      distances[token]["labels"] =
          gaps_to_json(demographic_parity_labels(v, config_.engine), &warnings);
    }
    // EQUALIZED_ODDS needs predictions and is produced by the model stage
  }

  ReportDoc doc;
  doc["datasetSummary"] = summary_json(config_, v);
  doc["distanceMetrics"] = std::move(distances);
  doc["warnings"] = warnings;
  return doc;
}

ReportDoc Pipeline::compute_model_performance_metrics() {
  if (!config_.score_field) {
    raise(Errc::MissingColumn, "model performance metrics need a score field");
  }
  const JoinedView& v = view();
  std::vector<std::string> warnings;
  const bool labeled = v.has_labels();

  // prediction-side distances
  Distribution predicted =
      prediction_distribution(v, config_.protected_attribute_fields, config_.engine);
  Distribution reference = config_.reference_distribution.materialize(predicted);

  ReportDoc distances = ReportDoc::object();
  for (const auto& token : config_.distance_metrics) {
    if (auto scalar = scalar_distance(token, predicted, reference, *registry_, &warnings,
                                      "predictions")) {
      distances[token]["predictions"] = std::move(*scalar);
    } else if (token == kDemographicParity) {
      distances[token]["predictions"] =
          gaps_to_json(demographic_parity_predictions(v, config_.engine), &warnings);
    } else if (token == kEqualizedOdds) {
      if (labeled) {
        distances[token] = eo_to_json(equalized_odds(v, config_.engine), &warnings);
      } else {
        distances[token] = metric_value(std::nullopt, "requires a label field");
      }
    }
  }

  // per-group performance and benefit vectors
  std::vector<GeneralizedConfusionMatrix> matrices;
  if (labeled) {
    matrices = group_confusion_matrices(v, config_.engine);
  } else {
    matrices.resize(v.group_count());
  }

  std::vector<std::vector<std::optional<double>>> token_values;
  std::vector<std::vector<std::string>> token_reasons;
  for (const auto& token : config_.performance_benefit_metrics) {
    std::vector<std::string> reasons;
    token_values.push_back(per_group_values(token, v, matrices, *registry_, &reasons));
    token_reasons.push_back(std::move(reasons));
  }

  ReportDoc by_group = ReportDoc::object();
  for (std::size_t g = 0; g < v.group_count(); ++g) {
    ReportDoc group_doc;
    group_doc["rows"] = v.group_rows(static_cast<std::int32_t>(g)).size();
    if (labeled) {
      group_doc["prevalence"] = matrices[g].prevalence();
    }
    for (std::size_t t = 0; t < config_.performance_benefit_metrics.size(); ++t) {
      group_doc[config_.performance_benefit_metrics[t]] =
          metric_value(token_values[t][g], token_reasons[t][g]);
    }
    by_group[v.group_names()[g]] = std::move(group_doc);
  }

  ReportDoc benefit_metrics = ReportDoc::object();
  for (const auto& overall : config_.overall_metrics) {
    ReportDoc row = ReportDoc::object();
    for (std::size_t t = 0; t < config_.performance_benefit_metrics.size(); ++t) {
      const auto& token = config_.performance_benefit_metrics[t];
      try {
        BenefitMap benefits =
            benefit_map_from_values(token, v.group_names(), token_values[t]);
        for (const auto& excluded : benefits.excluded) {
          warnings.push_back(token + ": group '" + excluded +
                             "' excluded from benefit vector (metric undefined)");
        }
        row[token] = overall_index_json(overall, benefits, *registry_, &warnings);
      } catch (const Error& error) {
        row[token] = metric_value(std::nullopt, error.what());
      }
    }
    benefit_metrics[overall.display()] = std::move(row);
  }

  // permutation tests
  ReportDoc tests = ReportDoc::array();
  if (config_.permutation_test) {
    const auto& pt = *config_.permutation_test;
    const std::uint64_t base_seed = pt.seed.value_or(config_.engine.seed);
    for (std::size_t m = 0; m < pt.metrics.size(); ++m) {
      PermutationTestSpec spec;
      spec.metric = pt.metrics[m];
      spec.num_permutations = pt.num_permutations;
      spec.sample_size = pt.sample_size;
      spec.seed = derive_seed(base_seed, 0x9000 + m);
      const auto* custom = registry_->find_custom(spec.metric);
      RowStatistic custom_stat;
      const RowStatistic* stat_ptr = nullptr;
      if (custom != nullptr && custom->kind == CustomMetricSpec::Kind::OnRows) {
        custom_stat = custom->on_rows;
        stat_ptr = &custom_stat;
      }
      auto outcome = run_pairwise_tests(v, spec, stat_ptr);
      for (const auto& result : outcome.results) {
        tests.push_back(to_json(result));
      }
      for (const auto& note : outcome.notes) {
        warnings.push_back("permutation test (" + spec.metric + "): " + note);
      }
    }
  }

  ReportDoc doc;
  doc["distanceMetrics"] = std::move(distances);
  doc["performanceByGroup"] = std::move(by_group);
  doc["benefitMetrics"] = std::move(benefit_metrics);
  doc["permutationTests"] = std::move(tests);
  doc["warnings"] = warnings;
  return doc;
}

FairnessReport Pipeline::run(bool write_output) {
  const JoinedView& v = view();

  ReportDoc dataset_part;
  if (config_.label_field) {
    dataset_part = compute_dataset_metrics();
  }
  ReportDoc model_part;
  if (config_.score_field) {
    model_part = compute_model_performance_metrics();
  }

  ReportDoc doc;
  doc["datasetSummary"] = summary_json(config_, v);

  ReportDoc distances = ReportDoc::object();
  for (const auto& token : config_.distance_metrics) {
    ReportDoc entry = ReportDoc::object();
    if (dataset_part.contains("distanceMetrics") &&
        dataset_part["distanceMetrics"].contains(token)) {
      for (auto& [stage, value] : dataset_part["distanceMetrics"][token].items()) {
        entry[stage] = value;
      }
    }
    if (model_part.contains("distanceMetrics") && model_part["distanceMetrics"].contains(token)) {
      for (auto& [stage, value] : model_part["distanceMetrics"][token].items()) {
        entry[stage] = value;
      }
    }
    if (entry.empty()) {
      const char* reason = token == kEqualizedOdds ? "requires a score field"
                                                   : "no stage could compute this metric";
      entry = metric_value(std::nullopt, reason);
    }
    distances[token] = std::move(entry);
  }
  doc["distanceMetrics"] = std::move(distances);

  if (model_part.contains("performanceByGroup")) {
    doc["performanceByGroup"] = model_part["performanceByGroup"];
  } else {
    doc["performanceByGroup"] = ReportDoc::object();
  }

  ReportDoc benefit_metrics = ReportDoc::object();
  if (model_part.contains("benefitMetrics")) {
    benefit_metrics = model_part["benefitMetrics"];
  } else {
    for (const auto& overall : config_.overall_metrics) {
      ReportDoc row = ReportDoc::object();
      for (const auto& token : config_.performance_benefit_metrics) {
        row[token] = metric_value(std::nullopt, "requires a score field");
      }
      benefit_metrics[overall.display()] = std::move(row);
    }
  }
  doc["benefitMetrics"] = std::move(benefit_metrics);

  doc["permutationTests"] =
      model_part.contains("permutationTests") ? model_part["permutationTests"] : ReportDoc::array();

  std::vector<std::string> warnings;
  for (const ReportDoc* part : {&dataset_part, &model_part}) {
    if (part->contains("warnings")) {
      for (const auto& w : (*part)["warnings"]) {
        warnings.push_back(w.get<std::string>());
      }
    }
  }
  if (config_.permutation_test && !config_.score_field) {
    warnings.push_back("permutation tests skipped: no score field configured");
  }
  doc["warnings"] = warnings;
  doc["provenance"] = provenance_json(config_);

  FairnessReport report{std::move(doc)};
  if (write_output) {
    write_report(report, config_.output_path);
  }
  return report;
}

FairnessReport run_pipeline(const Config& config, std::shared_ptr<const MetricRegistry> registry) {
  Pipeline pipeline(config, std::move(registry));
  return pipeline.run();
}

ReportDoc compute_dataset_metrics(const Config& config,
                                  std::shared_ptr<const MetricRegistry> registry) {
  Pipeline pipeline(config, std::move(registry));
  return pipeline.compute_dataset_metrics();
}

ReportDoc compute_model_performance_metrics(const Config& config,
                                            std::shared_ptr<const MetricRegistry> registry) {
  Pipeline pipeline(config, std::move(registry));
  return pipeline.compute_model_performance_metrics();
}

}  // namespace fairlift

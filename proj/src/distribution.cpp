#include "fairlift/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairlift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dimension columns are restricted to protected attributes and the label,
// which are the categorical columns a distribution can aggregate over.
struct DimPlan {
  std::vector<std::size_t> attr_positions;  // indices into the view's attribute fields
  bool uses_label = false;
  // distinct attribute sub-tuples, sorted; cell id = tuple_id * label_card + label
  std::vector<std::vector<std::string>> tuples;
  std::vector<std::size_t> group_to_tuple;  // group id -> tuple id
  std::size_t label_card = 1;

  std::size_t cells() const { return tuples.size() * label_card; }
};

DimPlan plan_dims(const JoinedView& view, const std::vector<std::string>& dims) {
  if (dims.empty()) {
    raise(Errc::InvalidArgument, "dims must be non-empty");
  }
  DimPlan plan;
  const auto& attrs = view.schema().attribute_fields;
  for (const auto& dim : dims) {
    if (view.schema().label_field && dim == *view.schema().label_field) {
      plan.uses_label = true;
      continue;
    }
    auto it = std::find(attrs.begin(), attrs.end(), dim);
    if (it == attrs.end()) {
      if (!view.table().has_column(dim)) {
        raise(Errc::MissingColumn, "dimension '" + dim + "' not present in view");
      }
      raise(Errc::InvalidArgument,
            "dimension '" + dim + "' is not a protected attribute or the label");
    }
    plan.attr_positions.push_back(static_cast<std::size_t>(it - attrs.begin()));
  }
  if (plan.uses_label) {
    plan.label_card = 2;
  }

  // Project each group tuple onto the requested attribute dims and assign
  // compact sorted ids.
  std::vector<std::vector<std::string>> projected;
  projected.reserve(view.group_count());
  for (const auto& tuple : view.group_tuples()) {
    std::vector<std::string> sub;
    sub.reserve(plan.attr_positions.size());
    for (auto pos : plan.attr_positions) {
      sub.push_back(tuple[pos]);
    }
    projected.push_back(std::move(sub));
  }
  std::vector<std::vector<std::string>> distinct = projected;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  plan.group_to_tuple.reserve(projected.size());
  for (const auto& sub : projected) {
    auto it = std::lower_bound(distinct.begin(), distinct.end(), sub);
    plan.group_to_tuple.push_back(static_cast<std::size_t>(it - distinct.begin()));
  }
  plan.tuples = std::move(distinct);
  return plan;
}

Distribution finalize(const JoinedView& view, const std::vector<std::string>& dims,
                      const DimPlan& plan, const std::vector<double>& cell_counts) {
  std::vector<std::pair<std::vector<std::string>, double>> observed;
  for (std::size_t cell = 0; cell < cell_counts.size(); ++cell) {
    if (cell_counts[cell] <= 0.0) {
      continue;
    }
    std::vector<std::string> category;
    const auto& tuple = plan.tuples[cell / plan.label_card];
    // category values follow the order dims were requested in
    std::size_t attr_next = 0;
    for (const auto& dim : dims) {
      if (plan.uses_label && view.schema().label_field && dim == *view.schema().label_field) {
        category.push_back(cell % plan.label_card == 1 ? "1" : "0");
      } else {
        category.push_back(tuple[attr_next++]);
      }
    }
    observed.emplace_back(std::move(category), cell_counts[cell]);
  }
  return Distribution::from_counts(dims, std::move(observed));
}

}  // namespace

std::string Distribution::category_label(std::size_t i) const {
  std::string label;
  for (std::size_t d = 0; d < support[i].size(); ++d) {
    if (d > 0) {
      label.push_back('|');
    }
    label += support[i][d];
  }
  return label;
}

Distribution Distribution::from_counts(
    std::vector<std::string> dims, std::vector<std::pair<std::vector<std::string>, double>> counts) {
  std::sort(counts.begin(), counts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Distribution dist;
  dist.dims = std::move(dims);
  for (auto& [category, count] : counts) {
    if (!dist.support.empty() && dist.support.back() == category) {
      raise(Errc::InvalidArgument, "duplicate category in distribution");
    }
    if (count < 0.0) {
      raise(Errc::InvalidArgument, "negative count in distribution");
    }
    dist.support.push_back(std::move(category));
    dist.counts.push_back(count);
  }
  dist.total_count = std::accumulate(dist.counts.begin(), dist.counts.end(), 0.0);
  if (dist.total_count <= 0.0) {
    raise(Errc::EmptyInput, "distribution has zero total mass");
  }
  for (double c : dist.counts) {
    dist.mass.push_back(c / dist.total_count);
  }
  return dist;
}

Distribution Distribution::uniform_like() const {
  Distribution uniform;
  uniform.dims = dims;
  uniform.support = support;
  const double k = static_cast<double>(support.size());
  uniform.counts.assign(support.size(), 1.0);
  uniform.mass.assign(support.size(), 1.0 / k);
  uniform.total_count = k;
  return uniform;
}

void ReferenceSpec::validate() const {
  if (kind == Kind::Explicit) {
    double total = 0.0;
    for (const auto& [category, probability] : explicit_mass) {
      if (probability < 0.0) {
        raise(Errc::InvalidArgument, "negative reference mass for '" + category + "'");
      }
      total += probability;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      raise(Errc::InvalidArgument,
            "explicit reference mass sums to " + std::to_string(total) + ", expected 1");
    }
  }
}

Distribution ReferenceSpec::materialize(const Distribution& observed) const {
  if (kind == Kind::Uniform) {
    return observed.uniform_like();
  }
  validate();
  // Explicit categories are display labels; multi-dimension categories join
  // their values with '|'.
  std::vector<std::pair<std::vector<std::string>, double>> counts;
  counts.reserve(explicit_mass.size());
  for (const auto& [category, probability] : explicit_mass) {
    std::vector<std::string> tuple;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= category.size(); ++pos) {
      if (pos == category.size() || category[pos] == '|') {
        tuple.push_back(category.substr(start, pos - start));
        start = pos + 1;
      }
    }
    counts.emplace_back(std::move(tuple), probability);
  }
  auto dist = Distribution::from_counts(observed.dims, std::move(counts));
  return dist;
}

Distribution observed_distribution(const JoinedView& view, const std::vector<std::string>& dims,
                                   const EngineOptions& engine) {
  auto plan = plan_dims(view, dims);
  auto chunks = plan_chunks(view.row_count(), engine.worker_count, engine.target_chunk_rows);

  const auto groups = view.group_ids();
  const bool uses_label = plan.uses_label;
  auto labels = uses_label ? view.labels() : std::span<const std::int64_t>{};

  using Counts = std::vector<std::uint64_t>;
  Counts totals = map_reduce(
      chunks,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        Counts local(plan.cells(), 0);
        for (std::size_t r = begin; r < end; ++r) {
          std::size_t cell = plan.group_to_tuple[static_cast<std::size_t>(groups[r])];
          if (uses_label) {
            cell = cell * 2 + static_cast<std::size_t>(labels[r]);
          }
          ++local[cell];
        }
        return local;
      },
      [](Counts acc, Counts part) {
        for (std::size_t i = 0; i < acc.size(); ++i) {
          acc[i] += part[i];
        }
        return acc;
      },
      Counts(plan.cells(), 0));

  std::vector<double> cell_counts(totals.begin(), totals.end());
  return finalize(view, dims, plan, cell_counts);
}

std::pair<std::vector<double>, std::vector<double>> align(const Distribution& p,
                                                          const Distribution& q) {
  std::vector<double> pm, qm;
  std::size_t i = 0, j = 0;
  while (i < p.size() || j < q.size()) {
    if (j >= q.size() || (i < p.size() && p.support[i] < q.support[j])) {
      pm.push_back(p.mass[i]);
      qm.push_back(0.0);
      ++i;
    } else if (i >= p.size() || q.support[j] < p.support[i]) {
      pm.push_back(0.0);
      qm.push_back(q.mass[j]);
      ++j;
    } else {
      pm.push_back(p.mass[i]);
      qm.push_back(q.mass[j]);
      ++i;
      ++j;
    }
  }
  return {std::move(pm), std::move(qm)};
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  auto [pm, qm] = align(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    if (pm[i] == 0.0) {
      continue;  // 0 * log(0/q) term
    }
    if (qm[i] == 0.0) {
      return kInf;  // absolute continuity violated; sentinel, not an exception
    }
    sum += pm[i] * std::log(pm[i] / qm[i]);
  }
  return sum;
}

double kl_divergence(const ReferenceSpec& p, const Distribution& q) {
  return kl_divergence(p.materialize(q), q);
}

double js_divergence(const Distribution& p, const Distribution& q) {
  auto [pm, qm] = align(p, q);
  double sum_p = 0.0, sum_q = 0.0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    const double m = 0.5 * (pm[i] + qm[i]);
    if (pm[i] > 0.0) {
      sum_p += pm[i] * std::log(pm[i] / m);
    }
    if (qm[i] > 0.0) {
      sum_q += qm[i] * std::log(qm[i] / m);
    }
  }
  return 0.5 * (sum_p + sum_q);
}

double lp_distance(const Distribution& p, const Distribution& q, double order) {
  if (std::isnan(order) || order < 1.0) {
    raise(Errc::InvalidOrder, "Lp order must be >= 1, got " + std::to_string(order));
  }
  auto [pm, qm] = align(p, q);
  if (std::isinf(order)) {
    double max_diff = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(pm[i] - qm[i]));
    }
    return max_diff;
  }
  if (order == 1.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
      sum += std::abs(pm[i] - qm[i]);
    }
    return sum;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    sum += std::pow(std::abs(pm[i] - qm[i]), order);
  }
  return std::pow(sum, 1.0 / order);
}

double total_variation(const Distribution& p, const Distribution& q) {
  return 0.5 * lp_distance(p, q, 1.0);
}

PairwiseGaps demographic_parity_labels(const JoinedView& view, const EngineOptions& engine) {
  auto labels = view.labels();
  const auto groups = view.group_ids();
  const std::size_t group_count = view.group_count();

  struct GroupCounts {
    std::vector<std::uint64_t> positives;
    std::vector<std::uint64_t> totals;
  };
  auto chunks = plan_chunks(view.row_count(), engine.worker_count, engine.target_chunk_rows);
  GroupCounts counts = map_reduce(
      chunks,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        GroupCounts local{std::vector<std::uint64_t>(group_count, 0),
                          std::vector<std::uint64_t>(group_count, 0)};
        for (std::size_t r = begin; r < end; ++r) {
          const auto g = static_cast<std::size_t>(groups[r]);
          local.positives[g] += static_cast<std::uint64_t>(labels[r]);
          ++local.totals[g];
        }
        return local;
      },
      [](GroupCounts acc, GroupCounts part) {
        for (std::size_t g = 0; g < acc.totals.size(); ++g) {
          acc.positives[g] += part.positives[g];
          acc.totals[g] += part.totals[g];
        }
        return acc;
      },
      GroupCounts{std::vector<std::uint64_t>(group_count, 0),
                  std::vector<std::uint64_t>(group_count, 0)});

  PairwiseGaps gaps;
  std::vector<std::pair<std::string, double>> rates;
  for (std::size_t g = 0; g < group_count; ++g) {
    if (counts.totals[g] == 0) {
      gaps.notes.push_back("group '" + view.group_names()[g] + "' has no rows; excluded");
      continue;
    }
    rates.emplace_back(view.group_names()[g],
                       static_cast<double>(counts.positives[g]) /
                           static_cast<double>(counts.totals[g]));
  }
  if (rates.size() < 2) {
    gaps.notes.push_back("fewer than two groups with rows; no pairs to compare");
    return gaps;
  }
  for (std::size_t a = 0; a < rates.size(); ++a) {
    for (std::size_t b = a + 1; b < rates.size(); ++b) {
      gaps.pairs.push_back(
          {{rates[a].first, rates[b].first}, std::abs(rates[a].second - rates[b].second)});
    }
  }
  return gaps;
}

}  // namespace fairlift

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairlift/engine.hpp"
#include "fairlift/join.hpp"

namespace fairlift {

/// Probability mass over observed category tuples (protected-attribute value
/// combinations, optionally crossed with the label). Support entries are
/// unique and lexicographically sorted. Counts are doubles because the
/// prediction-side distribution aggregates expected (fractional) counts; the
/// label-side distribution always carries integers.
struct Distribution {
  std::vector<std::string> dims;
  std::vector<std::vector<std::string>> support;
  std::vector<double> counts;
  std::vector<double> mass;
  double total_count = 0.0;

  std::size_t size() const { return support.size(); }
  std::string category_label(std::size_t i) const;

  static Distribution from_counts(std::vector<std::string> dims,
                                  std::vector<std::pair<std::vector<std::string>, double>> counts);

  /// Uniform mass 1/k over this distribution's support.
  Distribution uniform_like() const;
};

/// Desired benchmark distribution: uniform over the observed support, or an
/// explicit user-supplied mass (summing to 1 within 1e-9).
struct ReferenceSpec {
  enum class Kind { Uniform, Explicit };
  Kind kind = Kind::Uniform;
  std::vector<std::pair<std::string, double>> explicit_mass;

  void validate() const;
  Distribution materialize(const Distribution& observed) const;

  bool operator==(const ReferenceSpec&) const = default;
};

/// Aggregates the view across the given dimension columns (attribute fields
/// and/or the label field). Counting runs chunk-parallel; the resulting
/// distribution is a plain in-memory value.
Distribution observed_distribution(const JoinedView& view, const std::vector<std::string>& dims,
                                   const EngineOptions& engine = {});

/// Union-aligns two distributions (absent categories get mass 0) and returns
/// their mass vectors side by side.
std::pair<std::vector<double>, std::vector<double>> align(const Distribution& p,
                                                          const Distribution& q);

/// KL(P||Q) = sum_x P(x) ln(P(x)/Q(x)) in nats. Terms with P(x)=0 contribute
/// 0; any x with P(x)>0 and Q(x)=0 makes the result +infinity (sentinel, not
/// an exception).
double kl_divergence(const Distribution& p, const Distribution& q);
double kl_divergence(const ReferenceSpec& p, const Distribution& q);

/// (KL(P||M) + KL(Q||M)) / 2 with M = (P+Q)/2; finite, in [0, ln 2].
double js_divergence(const Distribution& p, const Distribution& q);

/// (sum |P-Q|^p)^(1/p); p = +infinity gives max |P-Q|. Throws InvalidOrder
/// for p < 1.
double lp_distance(const Distribution& p, const Distribution& q, double order);

/// Half the L1 distance; in [0,1].
double total_variation(const Distribution& p, const Distribution& q);

struct GroupPair {
  std::string g1, g2;  // g1 < g2 lexicographically

  auto operator<=>(const GroupPair&) const = default;
};

struct PairwiseGaps {
  std::vector<std::pair<GroupPair, double>> pairs;  // sorted by pair
  std::vector<std::string> notes;                   // excluded degenerate groups
};

/// |P(Y=1|G=g1) - P(Y=1|G=g2)| for every unordered group pair. Positive-rate
/// aggregation is chunk-parallel. Groups with zero rows are excluded and
/// reported in notes.
PairwiseGaps demographic_parity_labels(const JoinedView& view, const EngineOptions& engine = {});

}  // namespace fairlift

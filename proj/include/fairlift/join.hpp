#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairlift/column.hpp"
#include "fairlift/schema.hpp"

namespace fairlift {

/// Result of inner-joining a data table with the protected-attribute table.
/// Immutable once built; safe to share across worker threads. Rows keep the
/// original data-table order. Protected-attribute tuples are dictionary
/// encoded: group_ids() maps each row to an id into group_names(), which is
/// sorted lexicographically (multi-attribute tuples join their values with
/// '|' for display).
class JoinedView {
 public:
  JoinedView(ColumnarTable table, Schema schema, std::size_t matched_rows,
             std::size_t dropped_rows);

  std::size_t row_count() const { return table_.row_count(); }
  std::size_t matched_rows() const { return matched_rows_; }
  std::size_t dropped_rows() const { return dropped_rows_; }

  const ColumnarTable& table() const { return table_; }
  const Schema& schema() const { return schema_; }

  bool has_labels() const { return schema_.label_field.has_value(); }
  bool has_scores() const { return schema_.score_field.has_value(); }

  std::span<const std::int64_t> labels() const;
  std::span<const double> scores() const;

  std::span<const std::int32_t> group_ids() const { return *group_ids_; }
  const std::vector<std::string>& group_names() const { return group_names_; }
  const std::vector<std::vector<std::string>>& group_tuples() const { return group_tuples_; }
  std::size_t group_count() const { return group_names_.size(); }
  std::int32_t group_id(const std::string& name) const;

  /// Rows of each group, ascending row order. Built once at construction.
  const std::vector<std::size_t>& group_rows(std::int32_t group) const;

  /// Same view with the score column replaced (used by score normalization);
  /// every other column is shared, not copied.
  JoinedView with_scores(Float64Data scores) const;

  std::size_t byte_size() const;

 private:
  ColumnarTable table_;
  Schema schema_;
  std::size_t matched_rows_ = 0;
  std::size_t dropped_rows_ = 0;
  std::shared_ptr<const std::vector<std::int32_t>> group_ids_;
  std::vector<std::string> group_names_;
  std::vector<std::vector<std::string>> group_tuples_;
  std::vector<std::vector<std::size_t>> group_row_index_;
};

/// Inner join: keeps data rows whose key matches a protected-table key.
/// Protected keys must be unique. Throws DuplicateProtectedKey, DisjointKeys,
/// MissingColumn.
JoinedView join_protected(const ColumnarTable& data, const Schema& data_schema,
                          const ColumnarTable& protected_table, const std::string& data_key,
                          const std::string& protected_key,
                          const std::vector<std::string>& attribute_fields);

/// Narrow table over the requested columns; shares column storage with the
/// view (no copies). Throws MissingColumn, EmptyProjection.
ColumnarTable project(const JoinedView& view, const std::vector<std::string>& columns);

}  // namespace fairlift

#include "fairlift/join.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace fairlift {

namespace {

std::vector<std::string> key_strings(const Column& key_column) {
  std::vector<std::string> keys;
  keys.reserve(key_column.size());
  for (std::size_t i = 0; i < key_column.size(); ++i) {
    keys.push_back(key_column.cell_as_string(i));
  }
  return keys;
}

}  // namespace

JoinedView::JoinedView(ColumnarTable table, Schema schema, std::size_t matched_rows,
                       std::size_t dropped_rows)
    : table_(std::move(table)),
      schema_(std::move(schema)),
      matched_rows_(matched_rows),
      dropped_rows_(dropped_rows) {
  const std::size_t rows = table_.row_count();

  // Dictionary-encode the attribute tuple of every row; final ids follow the
  // lexicographic order of the display names. Interning keeps this a single
  // cheap pass even at tens of millions of rows.
  std::vector<const StringData*> attr_columns;
  for (const auto& attr : schema_.attribute_fields) {
    attr_columns.push_back(&table_.column(attr).strings());
  }
  std::unordered_map<std::string, std::int32_t> interned;
  std::vector<std::string> first_seen_names;
  std::vector<std::int32_t> provisional(rows);
  std::string name_buf;
  for (std::size_t r = 0; r < rows; ++r) {
    name_buf.clear();
    for (std::size_t c = 0; c < attr_columns.size(); ++c) {
      if (c > 0) {
        name_buf.push_back('|');
      }
      name_buf += (*attr_columns[c])[r];
    }
    auto [it, inserted] =
        interned.emplace(name_buf, static_cast<std::int32_t>(first_seen_names.size()));
    if (inserted) {
      first_seen_names.push_back(name_buf);
    }
    provisional[r] = it->second;
  }

  std::vector<std::int32_t> order(first_seen_names.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<std::int32_t>(i);
  }
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return first_seen_names[static_cast<std::size_t>(a)] <
           first_seen_names[static_cast<std::size_t>(b)];
  });
  std::vector<std::int32_t> to_sorted(order.size());
  group_names_.resize(order.size());
  for (std::size_t sorted = 0; sorted < order.size(); ++sorted) {
    to_sorted[static_cast<std::size_t>(order[sorted])] = static_cast<std::int32_t>(sorted);
    group_names_[sorted] = std::move(first_seen_names[static_cast<std::size_t>(order[sorted])]);
  }
  auto group_ids = std::make_shared<std::vector<std::int32_t>>(rows);
  group_row_index_.resize(group_names_.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::int32_t id = to_sorted[static_cast<std::size_t>(provisional[r])];
    (*group_ids)[r] = id;
    group_row_index_[static_cast<std::size_t>(id)].push_back(r);
  }
  group_ids_ = std::move(group_ids);

  // Tuples read back from a representative row, so attribute values holding
  // '|' never get mis-split.
  group_tuples_.resize(group_names_.size());
  for (std::size_t g = 0; g < group_names_.size(); ++g) {
    const std::size_t r0 = group_row_index_[g].front();
    for (const auto* col : attr_columns) {
      group_tuples_[g].push_back((*col)[r0]);
    }
  }
}

std::span<const std::int64_t> JoinedView::labels() const {
  if (!schema_.label_field) {
    raise(Errc::MissingColumn, "view has no label column");
  }
  return table_.column(*schema_.label_field).ints();
}

std::span<const double> JoinedView::scores() const {
  if (!schema_.score_field) {
    raise(Errc::MissingColumn, "view has no score column");
  }
  return table_.column(*schema_.score_field).floats();
}

std::int32_t JoinedView::group_id(const std::string& name) const {
  auto it = std::lower_bound(group_names_.begin(), group_names_.end(), name);
  if (it == group_names_.end() || *it != name) {
    raise(Errc::EmptyGroup, "no group named '" + name + "'");
  }
  return static_cast<std::int32_t>(it - group_names_.begin());
}

const std::vector<std::size_t>& JoinedView::group_rows(std::int32_t group) const {
  return group_row_index_.at(static_cast<std::size_t>(group));
}

JoinedView JoinedView::with_scores(Float64Data scores) const {
  if (!schema_.score_field) {
    raise(Errc::MissingColumn, "view has no score column");
  }
  if (scores.size() != row_count()) {
    raise(Errc::InvalidArgument, "replacement score column has wrong length");
  }
  ColumnarTable table;
  for (const auto& name : table_.column_names()) {
    if (name == *schema_.score_field) {
      table.add_column(name, Column(std::move(scores)));
    } else {
      table.add_column(name, table_.column(name));
    }
  }
  return JoinedView(std::move(table), schema_, matched_rows_, dropped_rows_);
}

std::size_t JoinedView::byte_size() const {
  return table_.byte_size() + group_ids_->size() * sizeof(std::int32_t);
}

JoinedView join_protected(const ColumnarTable& data, const Schema& data_schema,
                          const ColumnarTable& protected_table, const std::string& data_key,
                          const std::string& protected_key,
                          const std::vector<std::string>& attribute_fields) {
  auto data_keys = key_strings(data.column(data_key));
  auto protected_keys = key_strings(protected_table.column(protected_key));

  std::unordered_map<std::string, std::size_t> protected_index;
  protected_index.reserve(protected_keys.size());
  for (std::size_t r = 0; r < protected_keys.size(); ++r) {
    auto [it, inserted] = protected_index.emplace(protected_keys[r], r);
    if (!inserted) {
      raise(Errc::DuplicateProtectedKey,
            "protected key '" + protected_keys[r] + "' appears more than once");
    }
  }

  std::vector<std::size_t> data_rows;
  std::vector<std::size_t> protected_rows;
  data_rows.reserve(data_keys.size());
  protected_rows.reserve(data_keys.size());
  for (std::size_t r = 0; r < data_keys.size(); ++r) {
    auto it = protected_index.find(data_keys[r]);
    if (it != protected_index.end()) {
      data_rows.push_back(r);
      protected_rows.push_back(it->second);
    }
  }
  if (data_rows.empty()) {
    raise(Errc::DisjointKeys, "no data key matches any protected key");
  }

  auto gather_strings = [](const StringData& source, const std::vector<std::size_t>& rows) {
    StringData out;
    out.reserve(rows.size());
    for (auto r : rows) {
      out.push_back(source[r]);
    }
    return out;
  };

  ColumnarTable joined;
  joined.add_column(data_schema.uid_field,
                    Column(gather_strings(data.column(data_key).strings(), data_rows)));
  if (data_schema.label_field) {
    const auto& labels = data.column(*data_schema.label_field).ints();
    Int64Data out;
    out.reserve(data_rows.size());
    for (auto r : data_rows) {
      out.push_back(labels[r]);
    }
    joined.add_column(*data_schema.label_field, Column(std::move(out)));
  }
  if (data_schema.score_field) {
    const auto& scores = data.column(*data_schema.score_field).floats();
    Float64Data out;
    out.reserve(data_rows.size());
    for (auto r : data_rows) {
      out.push_back(scores[r]);
    }
    joined.add_column(*data_schema.score_field, Column(std::move(out)));
  }
  for (const auto& attr : attribute_fields) {
    joined.add_column(attr,
                      Column(gather_strings(protected_table.column(attr).strings(), protected_rows)));
  }

  Schema view_schema = data_schema;
  view_schema.attribute_fields = attribute_fields;
  const std::size_t matched = data_rows.size();
  const std::size_t dropped = data.row_count() - matched;
  return JoinedView(std::move(joined), std::move(view_schema), matched, dropped);
}

ColumnarTable project(const JoinedView& view, const std::vector<std::string>& columns) {
  if (columns.empty()) {
    raise(Errc::EmptyProjection, "projection over zero columns");
  }
  ColumnarTable narrow;
  for (const auto& name : columns) {
    narrow.add_column(name, view.table().column(name));  // shares storage
  }
  return narrow;
}

}  // namespace fairlift

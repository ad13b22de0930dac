#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "fairlift/error.hpp"

namespace fairlift {

using Int64Data = std::vector<std::int64_t>;
using Float64Data = std::vector<double>;
using StringData = std::vector<std::string>;

/// Immutable typed column. Storage is shared, so copying a Column (or
/// projecting a table) never copies the underlying values.
class Column {
 public:
  enum class Type { Int64, Float64, String };

  Column() : data_(std::make_shared<const Int64Data>()) {}
  explicit Column(Int64Data values) : data_(std::make_shared<const Int64Data>(std::move(values))) {}
  explicit Column(Float64Data values)
      : data_(std::make_shared<const Float64Data>(std::move(values))) {}
  explicit Column(StringData values) : data_(std::make_shared<const StringData>(std::move(values))) {}
  explicit Column(std::shared_ptr<const Int64Data> values) : data_(std::move(values)) {}
  explicit Column(std::shared_ptr<const Float64Data> values) : data_(std::move(values)) {}
  explicit Column(std::shared_ptr<const StringData> values) : data_(std::move(values)) {}

  Type type() const {
    return static_cast<Type>(data_.index());
  }

  std::size_t size() const {
    return std::visit([](const auto& ptr) { return ptr->size(); }, data_);
  }

  const Int64Data& ints() const { return deref<Int64Data>("int64"); }
  const Float64Data& floats() const { return deref<Float64Data>("float64"); }
  const StringData& strings() const { return deref<StringData>("string"); }

  std::shared_ptr<const Float64Data> float_data() const {
    return std::get<std::shared_ptr<const Float64Data>>(data_);
  }

  std::size_t byte_size() const;

  /// Canonical string form of one cell; int64 and string key columns compare
  /// equal across load formats through this.
  std::string cell_as_string(std::size_t row) const;

 private:
  template <typename T>
  const T& deref(const char* wanted) const {
    const auto* ptr = std::get_if<std::shared_ptr<const T>>(&data_);
    if (ptr == nullptr) {
      raise(Errc::TypeCoercion, std::string("column is not of type ") + wanted);
    }
    return **ptr;
  }

  std::variant<std::shared_ptr<const Int64Data>, std::shared_ptr<const Float64Data>,
               std::shared_ptr<const StringData>>
      data_;
};

/// Column-oriented record store. Columns are appended once at build time and
/// immutable afterwards; all columns have identical length.
class ColumnarTable {
 public:
  ColumnarTable() = default;

  void add_column(std::string name, Column column);

  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }

  bool has_column(const std::string& name) const { return index_.count(name) != 0; }
  const Column& column(const std::string& name) const;

  std::size_t byte_size() const;

 private:
  std::vector<std::string> names_;
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t row_count_ = 0;
};

}  // namespace fairlift

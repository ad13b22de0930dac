#include "fairlift/column.hpp"

#include <charconv>

namespace fairlift {

std::size_t Column::byte_size() const {
  return std::visit(
      [](const auto& ptr) -> std::size_t {
        using Vec = std::remove_cvref_t<decltype(*ptr)>;
        if constexpr (std::is_same_v<Vec, StringData>) {
          std::size_t total = ptr->size() * sizeof(std::string);
          for (const auto& s : *ptr) {
            total += s.capacity();
          }
          return total;
        } else {
          return ptr->size() * sizeof(typename Vec::value_type);
        }
      },
      data_);
}

std::string Column::cell_as_string(std::size_t row) const {
  switch (type()) {
    case Type::Int64: {
      char buf[24];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), ints()[row]);
      return std::string(buf, end);
    }
    case Type::Float64: {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), floats()[row]);
      return std::string(buf, end);
    }
    case Type::String:
      return strings()[row];
  }
  return {};
}

void ColumnarTable::add_column(std::string name, Column column) {
  if (index_.count(name) != 0) {
    raise(Errc::InvalidArgument, "duplicate column '" + name + "'");
  }
  if (!names_.empty() && column.size() != row_count_) {
    raise(Errc::InvalidArgument, "column '" + name + "' has " + std::to_string(column.size()) +
                                     " rows, table has " + std::to_string(row_count_));
  }
  row_count_ = column.size();
  index_.emplace(name, names_.size());
  names_.push_back(std::move(name));
  columns_.push_back(std::move(column));
}

const Column& ColumnarTable::column(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    raise(Errc::MissingColumn, "column '" + name + "' not present");
  }
  return columns_[it->second];
}

std::size_t ColumnarTable::byte_size() const {
  std::size_t total = 0;
  for (const auto& column : columns_) {
    total += column.byte_size();
  }
  return total;
}

}  // namespace fairlift

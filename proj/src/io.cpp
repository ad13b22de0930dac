#include "fairlift/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace fairlift {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::IoError, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

// RFC 4180: comma separated, optional quoting with "" escapes, quoted fields
// may span lines. CRLF and LF both end records.
std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& path) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  while (i < n) {
    if (text[i] == '"') {
      ++i;
      for (;;) {
        if (i >= n) {
          raise(Errc::IoError, "unterminated quoted field in '" + path + "'");
        }
        if (text[i] == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          field.push_back(text[i++]);
        }
      }
      if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        raise(Errc::IoError, "malformed quoting in '" + path + "'");
      }
    } else {
      while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        field.push_back(text[i++]);
      }
    }
    if (i >= n) {
      end_record();
      break;
    }
    if (text[i] == ',') {
      end_field();
      ++i;
    } else {
      if (text[i] == '\r') {
        ++i;
        if (i < n && text[i] == '\n') {
          ++i;
        }
      } else {
        ++i;  // '\n'
      }
      end_record();
      if (i >= n) {
        break;
      }
    }
  }
  if (!field.empty() || !record.empty()) {
    end_record();
  }
  // a trailing blank line produces a single empty field; drop it
  if (!records.empty() && records.back().size() == 1 && records.back()[0].empty()) {
    records.pop_back();
  }
  return records;
}

std::int64_t coerce_label(const std::string& raw, std::size_t row) {
  if (raw == "0" || raw == "false") {
    return 0;
  }
  if (raw == "1" || raw == "true") {
    return 1;
  }
  raise(Errc::TypeCoercion,
        "label value '" + raw + "' at row " + std::to_string(row) + " is not in {0,1}");
}

double coerce_score(const std::string& raw, std::size_t row) {
  double value = 0.0;
  const char* begin = raw.data();
  const char* end = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || raw.empty()) {
    raise(Errc::TypeCoercion, "unparseable score '" + raw + "' at row " + std::to_string(row));
  }
  return value;
}

struct ColumnBuilder {
  enum class Role { Uid, Label, Score, Attribute };
  Role role;
  std::string name;
  Int64Data ints;
  Float64Data floats;
  StringData strings;

  void add(const std::string& raw, std::size_t row) {
    switch (role) {
      case Role::Uid:
        if (raw.empty()) {
          raise(Errc::TypeCoercion, "null uid at row " + std::to_string(row));
        }
        strings.push_back(raw);
        break;
      case Role::Label:
        ints.push_back(coerce_label(raw, row));
        break;
      case Role::Score:
        floats.push_back(coerce_score(raw, row));
        break;
      case Role::Attribute:
        strings.push_back(raw.empty() ? std::string("UNKNOWN") : raw);
        break;
    }
  }

  Column finish() && {
    switch (role) {
      case Role::Label:
        return Column(std::move(ints));
      case Role::Score:
        return Column(std::move(floats));
      default:
        return Column(std::move(strings));
    }
  }
};

std::vector<ColumnBuilder> make_builders(const Schema& schema) {
  std::vector<ColumnBuilder> builders;
  builders.push_back({ColumnBuilder::Role::Uid, schema.uid_field, {}, {}, {}});
  if (schema.label_field) {
    builders.push_back({ColumnBuilder::Role::Label, *schema.label_field, {}, {}, {}});
  }
  if (schema.score_field) {
    builders.push_back({ColumnBuilder::Role::Score, *schema.score_field, {}, {}, {}});
  }
  for (const auto& attr : schema.attribute_fields) {
    builders.push_back({ColumnBuilder::Role::Attribute, attr, {}, {}, {}});
  }
  return builders;
}

ColumnarTable finish_table(std::vector<ColumnBuilder> builders, const std::string& path) {
  ColumnarTable table;
  for (auto& builder : builders) {
    std::string name = builder.name;
    table.add_column(std::move(name), std::move(builder).finish());
  }
  if (table.row_count() == 0) {
    raise(Errc::EmptyInput, "no data rows in '" + path + "'");
  }
  return table;
}

ColumnarTable load_csv(const std::string& path, const Schema& schema) {
  auto records = parse_csv(read_file(path), path);
  if (records.empty()) {
    raise(Errc::EmptyInput, "no data rows in '" + path + "'");
  }
  const auto& header = records.front();
  std::unordered_map<std::string, std::size_t> header_index;
  for (std::size_t c = 0; c < header.size(); ++c) {
    header_index.emplace(header[c], c);
  }

  auto builders = make_builders(schema);
  std::vector<std::size_t> source_index;
  for (const auto& builder : builders) {
    auto it = header_index.find(builder.name);
    if (it == header_index.end()) {
      raise(Errc::MissingColumn, "column '" + builder.name + "' absent from header of '" + path + "'");
    }
    source_index.push_back(it->second);
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.size() != header.size()) {
      raise(Errc::IoError, "row " + std::to_string(r) + " of '" + path + "' has " +
                               std::to_string(record.size()) + " fields, header has " +
                               std::to_string(header.size()));
    }
    for (std::size_t b = 0; b < builders.size(); ++b) {
      builders[b].add(record[source_index[b]], r);
    }
  }
  return finish_table(std::move(builders), path);
}

std::string json_scalar_to_string(const nlohmann::json& value, const std::string& key,
                                  std::size_t line) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return std::to_string(value.get<std::int64_t>());
  }
  if (value.is_number_unsigned()) {
    return std::to_string(value.get<std::uint64_t>());
  }
  if (value.is_number_float()) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value.get<double>());
    return std::string(buf, end);
  }
  raise(Errc::TypeCoercion,
        "value for '" + key + "' at line " + std::to_string(line) + " is not a scalar");
}

ColumnarTable load_jsonl(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) {
    raise(Errc::IoError, "cannot open '" + path + "'");
  }
  auto builders = make_builders(schema);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      raise(Errc::IoError, "line " + std::to_string(line_no) + " of '" + path +
                               "' is not a JSON object");
    }
    for (auto& builder : builders) {
      auto it = record.find(builder.name);
      if (it == record.end() || it->is_null()) {
        if (builder.role == ColumnBuilder::Role::Attribute) {
          builder.strings.push_back("UNKNOWN");
          continue;
        }
        raise(Errc::MissingColumn, "key '" + builder.name + "' absent at line " +
                                       std::to_string(line_no) + " of '" + path + "'");
      }
      switch (builder.role) {
        case ColumnBuilder::Role::Label:
          if (it->is_boolean()) {
            builder.ints.push_back(it->get<bool>() ? 1 : 0);
          } else if (it->is_number_integer() || it->is_number_unsigned()) {
            auto v = it->get<std::int64_t>();
            if (v != 0 && v != 1) {
              raise(Errc::TypeCoercion, "label value " + std::to_string(v) + " at line " +
                                            std::to_string(line_no) + " is not in {0,1}");
            }
            builder.ints.push_back(v);
          } else if (it->is_string()) {
            builder.ints.push_back(coerce_label(it->get<std::string>(), line_no));
          } else {
            raise(Errc::TypeCoercion,
                  "label at line " + std::to_string(line_no) + " is not 0/1/boolean");
          }
          break;
        case ColumnBuilder::Role::Score:
          if (it->is_number()) {
            builder.floats.push_back(it->get<double>());
          } else if (it->is_string()) {
            builder.floats.push_back(coerce_score(it->get<std::string>(), line_no));
          } else {
            raise(Errc::TypeCoercion,
                  "score at line " + std::to_string(line_no) + " is not numeric");
          }
          break;
        case ColumnBuilder::Role::Uid:
        case ColumnBuilder::Role::Attribute: {
          std::string raw = json_scalar_to_string(*it, builder.name, line_no);
          builder.add(raw, line_no);
          break;
        }
      }
    }
  }
  return finish_table(std::move(builders), path);
}

}  // namespace

Format format_from_path(const std::string& path) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "jsonl" || ext == "ndjson" || ext == "json") {
    return Format::Jsonl;
  }
  return Format::Csv;
}

ColumnarTable load_table(const std::string& path, const Schema& schema, Format format) {
  schema.validate();
  return format == Format::Csv ? load_csv(path, schema) : load_jsonl(path, schema);
}

}  // namespace fairlift

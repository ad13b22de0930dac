#include "fairlift/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fairlift {

namespace {

// ---- lexer ------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, String, Colon, Comma, Equals, LBracket, RBracket, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
  int column = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token token;
    token.line = line_;
    token.column = column_;
    if (pos_ >= text_.size()) {
      token.kind = Token::Kind::End;
      return token;
    }
    const char c = text_[pos_];
    switch (c) {
      case ':':
        token.kind = Token::Kind::Colon;
        advance();
        return token;
      case ',':
        token.kind = Token::Kind::Comma;
        advance();
        return token;
      case '=':
        token.kind = Token::Kind::Equals;
        advance();
        return token;
      case '[':
        token.kind = Token::Kind::LBracket;
        advance();
        return token;
      case ']':
        token.kind = Token::Kind::RBracket;
        advance();
        return token;
      case '\'':
      case '"': {
        token.kind = Token::Kind::String;
        const char quote = c;
        advance();
        while (pos_ < text_.size() && text_[pos_] != quote) {
          token.text.push_back(text_[pos_]);
          advance();
        }
        if (pos_ >= text_.size()) {
          fail(token, "unterminated string");
        }
        advance();  // closing quote
        return token;
      }
      default:
        if (is_ident_char(c)) {
          token.kind = Token::Kind::Ident;
          while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
            token.text.push_back(text_[pos_]);
            advance();
          }
          return token;
        }
        fail(token, std::string("unexpected character '") + c + "'");
    }
    return token;  // unreachable
  }

  [[noreturn]] static void fail(const Token& at, const std::string& message) {
    raise(Errc::ConfigSyntax, message + " at line " + std::to_string(at.line) + ", column " +
                                  std::to_string(at.column));
  }

 private:
  static bool is_ident_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == '-' || c == '+' || c == '/';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          advance();
        }
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---- document parser ---------------------------------------------------------

class DocumentParser {
 public:
  explicit DocumentParser(const std::string& text) : lexer_(text) { shift(); }

  ParsedDocument parse() {
    ParsedDocument doc;
    skip_commas();
    while (current_.kind != Token::Kind::End) {
      if (current_.kind != Token::Kind::Ident && current_.kind != Token::Kind::String) {
        Lexer::fail(current_, "expected a key");
      }
      std::string key = current_.text;
      shift();
      expect(Token::Kind::Colon, "expected ':' after key");
      ConfigValue value = parse_value();
      doc.entries.emplace_back(std::move(key), std::move(value));
      skip_commas();
    }
    return doc;
  }

 private:
  ConfigValue parse_value() {
    ConfigValue value;
    if (current_.kind == Token::Kind::LBracket) {
      shift();
      value.kind = ConfigValue::Kind::List;
      while (current_.kind != Token::Kind::RBracket) {
        if (current_.kind != Token::Kind::Ident && current_.kind != Token::Kind::String) {
          Lexer::fail(current_, "expected a list item");
        }
        ConfigItem item;
        item.token = current_.text;
        shift();
        if (current_.kind == Token::Kind::Colon || current_.kind == Token::Kind::Equals) {
          shift();
          if (current_.kind == Token::Kind::Ident || current_.kind == Token::Kind::String) {
            item.param = current_.text;
            shift();
          } else {
            item.param = "";  // bare 'TOKEN=' keeps an empty parameter
          }
        }
        value.list.push_back(std::move(item));
        if (current_.kind == Token::Kind::Comma) {
          shift();
        } else if (current_.kind != Token::Kind::RBracket) {
          Lexer::fail(current_, "expected ',' or ']' in list");
        }
      }
      shift();  // ']'
      return value;
    }
    if (current_.kind == Token::Kind::Ident || current_.kind == Token::Kind::String) {
      value.kind = ConfigValue::Kind::Scalar;
      value.scalar = current_.text;
      shift();
      // bare 'TOKEN=param' scalars keep their '=' for the item layer
      if (current_.kind == Token::Kind::Equals) {
        value.scalar.push_back('=');
        shift();
        if (current_.kind == Token::Kind::Ident || current_.kind == Token::Kind::String) {
          value.scalar += current_.text;
          shift();
        }
      }
      return value;
    }
    Lexer::fail(current_, "expected a value");
  }

  void expect(Token::Kind kind, const char* message) {
    if (current_.kind != kind) {
      Lexer::fail(current_, message);
    }
    shift();
  }

  void skip_commas() {
    while (current_.kind == Token::Kind::Comma) {
      shift();
    }
  }

  void shift() { current_ = lexer_.next(); }

  Lexer lexer_;
  Token current_;
};

// ---- helpers -----------------------------------------------------------------

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos = 0; pos <= text.size(); ++pos) {
    if (pos == text.size() || text[pos] == ',') {
      std::string part = trim(text.substr(start, pos - start));
      if (!part.empty()) {
        parts.push_back(std::move(part));
      }
      start = pos + 1;
    }
  }
  return parts;
}

ConfigItem item_from_string(const std::string& raw) {
  ConfigItem item;
  auto eq = raw.find('=');
  if (eq == std::string::npos) {
    item.token = trim(raw);
  } else {
    item.token = trim(raw.substr(0, eq));
    item.param = trim(raw.substr(eq + 1));
  }
  return item;
}

double parse_double(const std::string& text, const std::string& key) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    raise(Errc::InvalidArgument, "'" + key + "' value '" + text + "' is not a number");
  }
  return value;
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    raise(Errc::InvalidArgument,
          "'" + key + "' value '" + text + "' is not a non-negative integer");
  }
  return value;
}

const std::string& scalar_of(const ConfigValue& value, const std::string& key) {
  if (value.kind != ConfigValue::Kind::Scalar) {
    raise(Errc::InvalidArgument, "'" + key + "' expects a scalar value");
  }
  return value.scalar;
}

Format parse_format(const std::string& text, const std::string& key) {
  if (text == "csv") {
    return Format::Csv;
  }
  if (text == "jsonl") {
    return Format::Jsonl;
  }
  raise(Errc::InvalidArgument, "'" + key + "' must be 'csv' or 'jsonl', got '" + text + "'");
}

const std::set<std::string> kKnownKeys = {
    "datasetPath",
    "uidField",
    "labelField",
    "scoreField",
    "scoreType",
    "protectedAttributeField",
    "uidProtectedAttributeField",
    "protectedDatasetPath",
    "outputPath",
    "distanceMetrics",
    "performanceBenefitMetrics",
    "overallMetrics",
    "referenceDistribution",
    "datasetFormat",
    "protectedDatasetFormat",
    "engine.workerCount",
    "engine.targetChunkRows",
    "engine.cacheBudgetBytes",
    "engine.seed",
    "permutationTest.metrics",
    "permutationTest.numPermutations",
    "permutationTest.sampleSize",
    "permutationTest.seed",
};

std::string quoted(const std::string& text) { return "'" + text + "'"; }

std::string format_double(double value) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

const ConfigValue* ParsedDocument::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) {
      return &v;
    }
  }
  return nullptr;
}

ParsedDocument parse_document(const std::string& text) {
  return DocumentParser(text).parse();
}

std::vector<ConfigItem> metric_items(const ConfigValue& value) {
  std::vector<ConfigItem> items;
  if (value.kind == ConfigValue::Kind::Scalar) {
    for (const auto& part : split_commas(value.scalar)) {
      items.push_back(item_from_string(part));
    }
    return items;
  }
  for (const auto& listed : value.list) {
    // a quoted item may itself hold a comma-joined token string
    if (listed.token.find(',') != std::string::npos && !listed.param) {
      for (const auto& part : split_commas(listed.token)) {
        items.push_back(item_from_string(part));
      }
      continue;
    }
    ConfigItem item;
    item.token = trim(listed.token);
    item.param = listed.param;
    if (!item.param && item.token.find('=') != std::string::npos) {
      item = item_from_string(item.token);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::string OverallMetricSpec::display() const {
  if (!alpha) {
    return token;
  }
  return token + "(" + format_double(*alpha) + ")";
}

Schema Config::data_schema() const {
  Schema schema;
  schema.uid_field = uid_field;
  schema.label_field = label_field;
  schema.score_field = score_field;
  return schema;
}

Schema Config::protected_schema() const {
  Schema schema;
  schema.uid_field = uid_protected_attribute_field;
  schema.attribute_fields = protected_attribute_fields;
  return schema;
}

Config parse_config(const std::string& text, const MetricRegistry& registry) {
  ParsedDocument doc = parse_document(text);

  std::set<std::string> seen;
  for (const auto& [key, value] : doc.entries) {
    if (kKnownKeys.count(key) == 0) {
      raise(Errc::InvalidArgument, "unknown configuration key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      raise(Errc::InvalidArgument, "configuration key '" + key + "' appears more than once");
    }
  }

  auto required = [&](const std::string& key) -> const std::string& {
    const ConfigValue* value = doc.find(key);
    if (value == nullptr) {
      raise(Errc::MissingRequiredKey, "'" + key + "' is required");
    }
    return scalar_of(*value, key);
  };
  auto optional_scalar = [&](const std::string& key) -> std::optional<std::string> {
    const ConfigValue* value = doc.find(key);
    if (value == nullptr) {
      return std::nullopt;
    }
    return scalar_of(*value, key);
  };

  Config config;
  config.dataset_path = required("datasetPath");
  config.protected_dataset_path = required("protectedDatasetPath");
  config.output_path = required("outputPath");
  config.uid_field = required("uidField");
  config.uid_protected_attribute_field = required("uidProtectedAttributeField");
  config.protected_attribute_fields = split_commas(required("protectedAttributeField"));
  if (config.protected_attribute_fields.empty()) {
    raise(Errc::InvalidArgument, "'protectedAttributeField' names no fields");
  }

  config.label_field = optional_scalar("labelField");
  config.score_field = optional_scalar("scoreField");
  if (!config.label_field && !config.score_field) {
    raise(Errc::MissingRequiredKey, "at least one of 'labelField'/'scoreField' is required");
  }
  if (auto score_type = optional_scalar("scoreType")) {
    if (*score_type == "PROB") {
      config.score_type = ScoreType::Prob;
    } else if (*score_type == "RAW") {
      config.score_type = ScoreType::Raw;
    } else {
      raise(Errc::InvalidArgument, "'scoreType' must be PROB or RAW, got '" + *score_type + "'");
    }
  }
  if (config.score_field && !config.score_type) {
    raise(Errc::MissingRequiredKey, "'scoreType' is required when 'scoreField' is set");
  }

  if (auto format = optional_scalar("datasetFormat")) {
    config.dataset_format = parse_format(*format, "datasetFormat");
  }
  if (auto format = optional_scalar("protectedDatasetFormat")) {
    config.protected_dataset_format = parse_format(*format, "protectedDatasetFormat");
  }

  if (const ConfigValue* value = doc.find("distanceMetrics")) {
    for (const auto& item : metric_items(*value)) {
      if (!registry.valid_distance_token(item.token)) {
        raise(Errc::UnknownMetricToken, "'" + item.token + "' is not a distance metric");
      }
      if (item.param && !item.param->empty()) {
        raise(Errc::InvalidArgument, "distance metric '" + item.token + "' takes no parameter");
      }
      config.distance_metrics.push_back(item.token);
    }
  }
  if (const ConfigValue* value = doc.find("performanceBenefitMetrics")) {
    for (const auto& item : metric_items(*value)) {
      if (!registry.valid_performance_token(item.token)) {
        raise(Errc::UnknownMetricToken, "'" + item.token + "' is not a performance metric");
      }
      if (item.param && !item.param->empty()) {
        raise(Errc::InvalidArgument, "performance metric '" + item.token + "' takes no parameter");
      }
      config.performance_benefit_metrics.push_back(item.token);
    }
  }
  if (const ConfigValue* value = doc.find("overallMetrics")) {
    for (const auto& item : metric_items(*value)) {
      if (!registry.valid_overall_token(item.token)) {
        raise(Errc::UnknownMetricToken, "'" + item.token + "' is not an overall metric");
      }
      OverallMetricSpec spec;
      spec.token = item.token;
      if (item.param && !item.param->empty()) {
        spec.alpha = parse_double(*item.param, item.token);
      }
      if (spec.token == kGeneralizedEntropyIndex) {
        if (!spec.alpha) {
          raise(Errc::InvalidArgument,
                std::string(kGeneralizedEntropyIndex) + " requires an alpha parameter");
        }
        if (*spec.alpha == 0.0 || *spec.alpha == 1.0) {
          raise(Errc::InvalidAlpha, "alpha in {0,1}; use THEIL_L_INDEX / THEIL_T_INDEX");
        }
      }
      config.overall_metrics.push_back(std::move(spec));
    }
  }

  if (const ConfigValue* value = doc.find("referenceDistribution")) {
    if (value->kind == ConfigValue::Kind::Scalar) {
      if (value->scalar != "UNIFORM") {
        raise(Errc::InvalidArgument,
              "'referenceDistribution' must be UNIFORM or an explicit category list");
      }
      config.reference_distribution.kind = ReferenceSpec::Kind::Uniform;
    } else {
      config.reference_distribution.kind = ReferenceSpec::Kind::Explicit;
      for (const auto& item : value->list) {
        if (!item.param || item.param->empty()) {
          raise(Errc::InvalidArgument,
                "explicit reference category '" + item.token + "' needs a probability");
        }
        config.reference_distribution.explicit_mass.emplace_back(
            item.token, parse_double(*item.param, "referenceDistribution"));
      }
      config.reference_distribution.validate();
    }
  }

  if (auto workers = optional_scalar("engine.workerCount")) {
    auto parsed = parse_uint(*workers, "engine.workerCount");
    if (parsed < 1) {
      raise(Errc::InvalidArgument, "'engine.workerCount' must be >= 1");
    }
    config.engine.worker_count = static_cast<int>(parsed);
  }
  if (auto chunk_rows = optional_scalar("engine.targetChunkRows")) {
    auto parsed = parse_uint(*chunk_rows, "engine.targetChunkRows");
    if (parsed < 1) {
      raise(Errc::InvalidArgument, "'engine.targetChunkRows' must be >= 1");
    }
    config.engine.target_chunk_rows = parsed;
  }
  if (auto budget = optional_scalar("engine.cacheBudgetBytes")) {
    config.engine.cache_budget_bytes = parse_uint(*budget, "engine.cacheBudgetBytes");
  }
  if (auto seed = optional_scalar("engine.seed")) {
    config.engine.seed = parse_uint(*seed, "engine.seed");
  }

  const bool has_permutation_key =
      doc.find("permutationTest.metrics") != nullptr ||
      doc.find("permutationTest.numPermutations") != nullptr ||
      doc.find("permutationTest.sampleSize") != nullptr ||
      doc.find("permutationTest.seed") != nullptr;
  if (has_permutation_key) {
    PermutationTestConfig permutation;
    const ConfigValue* metrics = doc.find("permutationTest.metrics");
    if (metrics == nullptr) {
      raise(Errc::MissingRequiredKey, "'permutationTest.metrics' is required to run tests");
    }
    for (const auto& item : metric_items(*metrics)) {
      if (!registry.valid_performance_token(item.token)) {
        raise(Errc::UnknownMetricToken, "'" + item.token + "' is not a performance metric");
      }
      permutation.metrics.push_back(item.token);
    }
    if (permutation.metrics.empty()) {
      raise(Errc::InvalidArgument, "'permutationTest.metrics' names no metrics");
    }
    if (auto count = optional_scalar("permutationTest.numPermutations")) {
      auto parsed = parse_uint(*count, "permutationTest.numPermutations");
      if (parsed < 100) {
        raise(Errc::InvalidArgument,
              "'permutationTest.numPermutations' must be >= 100 for reportable p-values");
      }
      permutation.num_permutations = static_cast<int>(parsed);
    }
    if (auto size = optional_scalar("permutationTest.sampleSize")) {
      auto parsed = parse_uint(*size, "permutationTest.sampleSize");
      if (parsed < 2) {
        raise(Errc::InvalidArgument, "'permutationTest.sampleSize' must be >= 2 per group");
      }
      permutation.sample_size = parsed;
    }
    if (auto seed = optional_scalar("permutationTest.seed")) {
      permutation.seed = parse_uint(*seed, "permutationTest.seed");
    }
    config.permutation_test = std::move(permutation);
  }

  return config;
}

Config load_config(const std::string& path, const MetricRegistry& registry) {
  std::ifstream in(path);
  if (!in) {
    raise(Errc::IoError, "cannot open config '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), registry);
}

std::string serialize_config(const Config& config) {
  std::ostringstream out;
  auto entry = [&out](const std::string& key, const std::string& value) {
    out << quoted(key) << ": " << quoted(value) << ",\n";
  };
  entry("datasetPath", config.dataset_path);
  entry("uidField", config.uid_field);
  if (config.label_field) {
    entry("labelField", *config.label_field);
  }
  if (config.score_field) {
    entry("scoreField", *config.score_field);
  }
  if (config.score_type) {
    entry("scoreType", *config.score_type == ScoreType::Prob ? "PROB" : "RAW");
  }
  {
    std::string joined;
    for (const auto& field : config.protected_attribute_fields) {
      if (!joined.empty()) {
        joined += ",";
      }
      joined += field;
    }
    entry("protectedAttributeField", joined);
  }
  entry("uidProtectedAttributeField", config.uid_protected_attribute_field);
  entry("protectedDatasetPath", config.protected_dataset_path);
  entry("outputPath", config.output_path);
  if (config.dataset_format) {
    entry("datasetFormat", *config.dataset_format == Format::Csv ? "csv" : "jsonl");
  }
  if (config.protected_dataset_format) {
    entry("protectedDatasetFormat",
          *config.protected_dataset_format == Format::Csv ? "csv" : "jsonl");
  }

  auto token_list = [&out](const std::string& key, const std::vector<std::string>& tokens) {
    if (tokens.empty()) {
      return;
    }
    out << quoted(key) << ": [";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) {
        out << ", ";
      }
      out << quoted(tokens[i]);
    }
    out << "],\n";
  };
  token_list("distanceMetrics", config.distance_metrics);
  token_list("performanceBenefitMetrics", config.performance_benefit_metrics);
  if (!config.overall_metrics.empty()) {
    out << quoted("overallMetrics") << ": [";
    for (std::size_t i = 0; i < config.overall_metrics.size(); ++i) {
      if (i > 0) {
        out << ", ";
      }
      const auto& spec = config.overall_metrics[i];
      out << quoted(spec.token);
      if (spec.alpha) {
        out << ": " << quoted(format_double(*spec.alpha));
      }
    }
    out << "],\n";
  }

  if (config.reference_distribution.kind == ReferenceSpec::Kind::Uniform) {
    entry("referenceDistribution", "UNIFORM");
  } else {
    out << quoted("referenceDistribution") << ": [";
    const auto& mass = config.reference_distribution.explicit_mass;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (i > 0) {
        out << ", ";
      }
      out << quoted(mass[i].first) << ": " << quoted(format_double(mass[i].second));
    }
    out << "],\n";
  }

  entry("engine.workerCount", std::to_string(config.engine.worker_count));
  entry("engine.targetChunkRows", std::to_string(config.engine.target_chunk_rows));
  entry("engine.cacheBudgetBytes", std::to_string(config.engine.cache_budget_bytes));
  entry("engine.seed", std::to_string(config.engine.seed));

  if (config.permutation_test) {
    const auto& permutation = *config.permutation_test;
    token_list("permutationTest.metrics", permutation.metrics);
    entry("permutationTest.numPermutations", std::to_string(permutation.num_permutations));
    entry("permutationTest.sampleSize", std::to_string(permutation.sample_size));
    if (permutation.seed) {
      entry("permutationTest.seed", std::to_string(*permutation.seed));
    }
  }
  return out.str();
}

}  // namespace fairlift

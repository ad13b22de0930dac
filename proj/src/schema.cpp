#include "fairlift/schema.hpp"

#include <algorithm>

#include "fairlift/error.hpp"

namespace fairlift {

void Schema::validate() const {
  if (uid_field.empty()) {
    raise(Errc::InvalidArgument, "uidField must be non-empty");
  }
  if (std::find(attribute_fields.begin(), attribute_fields.end(), uid_field) !=
      attribute_fields.end()) {
    raise(Errc::InvalidArgument, "uidField '" + uid_field + "' also listed as attribute field");
  }
}

std::vector<std::string> Schema::declared_columns() const {
  std::vector<std::string> cols{uid_field};
  if (label_field) {
    cols.push_back(*label_field);
  }
  if (score_field) {
    cols.push_back(*score_field);
  }
  for (const auto& attr : attribute_fields) {
    cols.push_back(attr);
  }
  return cols;
}

}  // namespace fairlift

#pragma once

#include <string>

#include "fairlift/column.hpp"
#include "fairlift/schema.hpp"

namespace fairlift {

/// Loads a CSV (RFC 4180, first row header) or JSON-lines file, projecting
/// exactly the columns declared by the schema.
///
/// Coercions applied while loading:
///   - uid          -> string (numbers canonicalized, so "42" joins 42)
///   - label        -> int64 in {0,1}; accepts 0/1, true/false, "0"/"1"
///   - score        -> float64
///   - attributes   -> string; empty/null values become "UNKNOWN"
///
/// Throws MissingColumn, TypeCoercion, EmptyInput, IoError.
ColumnarTable load_table(const std::string& path, const Schema& schema, Format format);

Format format_from_path(const std::string& path);

}  // namespace fairlift

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

/// Tabular results with their provenance, written and read back as CSV or JSON.
namespace resetfp::output {

/// Empty (null), number, or text.
using Cell = std::variant<std::monostate, double, std::string>;

struct OutputRecord {
  /// Ordered key/value pairs: command, every flag value, tool version, and
  /// run facts such as discarded-sample counts.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Replaces the value of an existing key or appends a new one.
  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  /// Throws InvalidArgument for an unknown column.
  std::size_t column(std::string_view name) const;

  bool operator==(const OutputRecord&) const = default;
};

enum class Format { Csv, Json };

/// Shortest text that carries 17 significant digits ("%.17g" semantics).
std::string format_number(double value);

/// `# key=value` lines, then a header row, then one line per row (RFC 4180
/// quoting). Numbers are bare, text is always quoted, null is an empty field.
std::string write_csv(const OutputRecord& record);
OutputRecord read_csv(std::string_view text);

/// {"metadata": {...}, "columns": [...], "rows": [{column: value, ...}, ...]}.
/// Non-finite numbers are written as the strings "inf", "-inf", "nan" and read
/// back as numbers, so text cells with exactly those values do not round-trip.
/// Column names must be distinct.
std::string write_json(const OutputRecord& record);
OutputRecord read_json(std::string_view text);

std::string write(const OutputRecord& record, Format format);
OutputRecord read(std::string_view text, Format format);

}  // namespace resetfp::output

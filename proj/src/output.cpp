#include "resetfp/output.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <json.hpp>

#include "resetfp/error.hpp"

namespace resetfp::output {
namespace {

using Json = nlohmann::ordered_json;

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

bool needs_quotes(std::string_view text) {
  // a leading '#' would read back as a metadata line
  return text.empty() || text.front() == '#' ||
         text.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Splits one CSV record starting at `pos`; advances `pos` past its line break.
std::vector<Field> parse_record(std::string_view text, std::size_t& pos) {
  std::vector<Field> fields;
  Field field;
  bool in_quotes = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (in_quotes) {
      if (c != '"') {
        field.text += c;
      } else if (pos < text.size() && text[pos] == '"') {
        field.text += '"';
        ++pos;
      } else {
        in_quotes = false;
      }
    } else if (c == '"') {
      in_quotes = true;
      field.quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field = {};
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
      break;
    } else {
      field.text += c;
    }
  }
  if (in_quotes) throw Error(Errc::InvalidArgument, "unterminated quoted CSV field");
  fields.push_back(std::move(field));
  return fields;
}

std::string_view next_line(std::string_view text, std::size_t& pos) {
  const std::size_t end = text.find('\n', pos);
  std::string_view line = text.substr(pos, end == std::string_view::npos ? end : end - pos);
  pos = end == std::string_view::npos ? text.size() : end + 1;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

Json cell_to_json(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return nullptr;
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  const double v = std::get<double>(cell);
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

Cell json_to_cell(const Json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  throw Error(Errc::InvalidArgument, "unsupported JSON cell " + j.dump());
}

}  // namespace

void OutputRecord::set(std::string key, std::string value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> OutputRecord::get(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::size_t OutputRecord::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error(Errc::InvalidArgument, "no column named " + std::string(name));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::string write_csv(const OutputRecord& record) {
  std::string out;
  for (const auto& [key, value] : record.metadata) {
    if (key.find_first_of("=\r\n") != std::string::npos ||
        value.find_first_of("\r\n") != std::string::npos) {
      throw Error(Errc::InvalidArgument, "metadata entry " + key + " cannot be written as CSV");
    }
    out += "# " + key + "=" + value + "\n";
  }
  for (std::size_t i = 0; i < record.columns.size(); ++i) {
    if (i) out += ',';
    out += needs_quotes(record.columns[i]) ? quote(record.columns[i]) : record.columns[i];
  }
  out += '\n';
  for (const auto& row : record.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* v = std::get_if<double>(&row[i])) {
        out += format_number(*v);
      } else if (const auto* s = std::get_if<std::string>(&row[i])) {
        out += quote(*s);
      }
    }
    out += '\n';
  }
  return out;
}

OutputRecord read_csv(std::string_view text) {
  OutputRecord record;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    std::string_view line = next_line(text, pos);
    line.remove_prefix(1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidArgument, "metadata line without '='");
    }
    record.metadata.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  if (pos >= text.size()) throw Error(Errc::InvalidArgument, "CSV has no header row");
  for (auto& field : parse_record(text, pos)) record.columns.push_back(std::move(field.text));
  while (pos < text.size()) {
    const auto fields = parse_record(text, pos);
    // a blank line is a null row only in a one-column table
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted &&
        record.columns.size() != 1) {
      continue;
    }
    if (fields.size() != record.columns.size()) {
      throw Error(Errc::InvalidArgument, "CSV row has " + std::to_string(fields.size()) +
                                             " fields, header has " +
                                             std::to_string(record.columns.size()));
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& field : fields) {
      if (field.quoted) {
        row.emplace_back(field.text);
      } else if (field.text.empty()) {
        row.emplace_back(std::monostate{});
      } else if (auto v = parse_number(field.text)) {
        row.emplace_back(*v);
      } else {
        throw Error(Errc::InvalidArgument, "bad numeric CSV field '" + field.text + "'");
      }
    }
    record.rows.push_back(std::move(row));
  }
  return record;
}

std::string write_json(const OutputRecord& record) {
  Json root;
  Json meta = Json::object();
  for (const auto& [key, value] : record.metadata) meta[key] = value;
  root["metadata"] = std::move(meta);
  root["columns"] = record.columns;
  Json rows = Json::array();
  for (const auto& row : record.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[record.columns.at(i)] = cell_to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

OutputRecord read_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::InvalidArgument, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("metadata") || !root.contains("rows")) {
    throw Error(Errc::InvalidArgument, "JSON output must hold metadata and rows");
  }
  OutputRecord record;
  for (const auto& [key, value] : root["metadata"].items()) {
    record.metadata.emplace_back(key, value.get<std::string>());
  }
  if (root.contains("columns")) {
    record.columns = root["columns"].get<std::vector<std::string>>();
  }
  for (const auto& obj : root["rows"]) {
    if (record.columns.empty()) {
      for (const auto& [key, value] : obj.items()) record.columns.push_back(key);
    }
    std::vector<Cell> row;
    row.reserve(record.columns.size());
    for (const auto& name : record.columns) row.push_back(json_to_cell(obj.at(name)));
    record.rows.push_back(std::move(row));
  }
  return record;
}

std::string write(const OutputRecord& record, Format format) {
  return format == Format::Csv ? write_csv(record) : write_json(record);
}

OutputRecord read(std::string_view text, Format format) {
  return format == Format::Csv ? read_csv(text) : read_json(text);
}

}  // namespace resetfp::output

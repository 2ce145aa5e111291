#include "core/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace tourkit::csv {

namespace {

std::string where(const Table& table, const Row& row) {
  return table.source() + ":" + std::to_string(row.line);
}

}  // namespace

Table::Table(std::string source, std::vector<std::string> header, std::vector<Row> rows)
    : source_(std::move(source)), header_(std::move(header)), rows_(std::move(rows)) {}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header_.begin());
}

std::size_t Table::column(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  fail(ErrorCode::parse, source_ + ": missing column '" + std::string(name) + "'");
}

void Table::require_columns(const std::vector<std::string>& required,
                            const std::vector<std::string>& optional) const {
  for (const auto& name : required) (void)column(name);
  for (const auto& name : header_) {
    const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                       std::find(optional.begin(), optional.end(), name) != optional.end();
    if (!known) fail(ErrorCode::parse, source_ + ": unknown column '" + name + "'");
  }
}

const std::string& Table::at(const Row& row, std::size_t column) const {
  if (column >= row.fields.size()) {
    fail(ErrorCode::parse, where(*this, row) + ": expected " + std::to_string(header_.size()) +
                               " fields, found " + std::to_string(row.fields.size()));
  }
  return row.fields[column];
}

Table parse(std::string_view text, std::string source) {
  std::vector<Row> records;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (row_has_content || !current.fields.empty() || !field.empty()) {
      end_field();
      records.push_back(std::move(current));
    }
    current = Row{};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        current.line = line;
        break;
      default:
        field.push_back(c);
        row_has_content = true;
    }
  }
  if (in_quotes) fail(ErrorCode::parse, source + ": unterminated quoted field");
  end_row();

  if (records.empty()) fail(ErrorCode::parse, source + ": missing header row");
  std::vector<std::string> header = std::move(records.front().fields);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  records.erase(records.begin());
  for (const auto& row : records) {
    if (row.fields.size() != header.size()) {
      fail(ErrorCode::parse, source + ":" + std::to_string(row.line) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(row.fields.size()));
    }
  }
  return Table(std::move(source), std::move(header), std::move(records));
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << join_row(header) << '\n';
  for (const auto& row : rows) out << join_row(row) << '\n';
  if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

long long to_int(const Table& table, const Row& row, std::size_t column) {
  const std::string& text = table.at(row, column);
  long long value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    fail(ErrorCode::parse, where(table, row) + ": column '" + table.header()[column] +
                               "' is not an integer: '" + text + "'");
  }
  return value;
}

double to_double(const Table& table, const Row& row, std::size_t column) {
  const std::string& text = table.at(row, column);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(value)) {
    fail(ErrorCode::parse, where(table, row) + ": column '" + table.header()[column] +
                               "' is not a finite number: '" + text + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace tourkit::csv

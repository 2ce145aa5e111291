#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tourkit::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

// A parsed comma-separated file with a mandatory header row.
class Table {
 public:
  Table() = default;
  Table(std::string source, std::vector<std::string> header, std::vector<Row> rows);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }

  std::optional<std::size_t> find_column(std::string_view name) const;
  // Throws a parse error naming the file when the column is absent.
  std::size_t column(std::string_view name) const;

  // Rejects any header column not in `allowed`.
  void require_columns(const std::vector<std::string>& required,
                       const std::vector<std::string>& optional = {}) const;

  const std::string& at(const Row& row, std::size_t column) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

Table parse(std::string_view text, std::string source = "<memory>");
Table read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// Writes header + rows atomically enough for our purposes (truncate + write).
void write_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

// Numeric field helpers that report file and line on failure.
long long to_int(const Table& table, const Row& row, std::size_t column);
double to_double(const Table& table, const Row& row, std::size_t column);

std::string format_double(double value);

}  // namespace tourkit::csv

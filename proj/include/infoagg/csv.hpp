#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace infoagg::csv {

using Row = std::vector<std::string>;

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);
std::string format_row(const Row& row);  // with trailing newline

// Quoted fields may contain commas, doubled quotes and newlines.
// Throws std::runtime_error on an unterminated quote.
std::vector<Row> parse(std::string_view text);
std::vector<Row> read_file(const std::string& path);

// Header-indexed view of one parsed table.
class Table {
public:
  explicit Table(std::vector<Row> rows);
  const Row& header() const noexcept { return header_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  // Column index or -1.
  int column(std::string_view name) const;
  // Empty string when the column is missing or the row is short.
  std::string get(const Row& row, std::string_view name) const;

private:
  Row header_;
  std::vector<Row> rows_;
};

} // namespace infoagg::csv

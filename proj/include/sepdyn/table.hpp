#pragma once

// ===========================================================================
// Deterministic tabular output.  A Table is an ordered header row plus rows
// of typed cells; rendering produces byte-stable CSV (header line, comma
// separators, '.' decimal point, no locale hooks) or JSON (an array of row
// objects keyed by the headers).  Numeric cells render in scientific
// notation with 17 significant digits, enough for a double to survive a
// text round trip bit for bit.
// ===========================================================================

#include <cstddef>
#include <string>
#include <vector>

namespace sepdyn {

// One table cell: either a number or verbatim text.
struct Cell {
  enum class Kind { number, text };

  Kind kind = Kind::number;
  double num = 0.0;
  std::string str;

  static Cell number(double v) { return {Kind::number, v, {}}; }
  static Cell text(std::string s) { return {Kind::text, 0.0, std::move(s)}; }
};

// Full-precision scientific rendering (17 significant digits) used for
// every numeric cell.
std::string format_number(double v);

class Table {
 public:
  explicit Table(std::vector<std::string> headers);

  // Appends one row; the cell count must match the header count.
  void add_row(std::vector<Cell> cells);

  const std::vector<std::string>& headers() const { return headers_; }
  std::size_t row_count() const { return rows_.size(); }

  std::string to_csv() const;
  std::string to_json() const;

 private:
  std::vector<std::string> headers_;
  std::vector<std::vector<Cell>> rows_;
};

enum class TableFormat { csv, json };

// "csv" or "json"; anything else raises ConfigError.
TableFormat table_format_from(const std::string& name);

std::string render_table(const Table& table, TableFormat format);

// Empty path writes to stdout; otherwise creates/overwrites the file.
// Throws ConfigError when the file cannot be opened.
void write_table(const Table& table, TableFormat format,
                 const std::string& out_path);

}  // namespace sepdyn

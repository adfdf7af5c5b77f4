#include "sepdyn/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "sepdyn/errors.hpp"

namespace sepdyn {

// ===========================================================================
// cell rendering
// ===========================================================================

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

// CSV text cells are quoted only when they contain a delimiter, a quote, or
// a line break; embedded quotes double up.
std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string csv_cell(const Cell& c) {
  return c.kind == Cell::Kind::number ? format_number(c.num)
                                      : csv_text(c.str);
}

// JSON carries numbers verbatim; non-finite values have no JSON literal and
// degrade to null.
std::string json_cell(const Cell& c) {
  if (c.kind == Cell::Kind::text) return json_text(c.str);
  if (!std::isfinite(c.num)) return "null";
  return format_number(c.num);
}

}  // namespace

// ===========================================================================
// table assembly and rendering
// ===========================================================================

Table::Table(std::vector<std::string> headers)
    : headers_(std::move(headers)) {
  if (headers_.empty())
    throw DomainError("Table: at least one column is required");
}

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != headers_.size())
    throw DomainError("Table: row width does not match the header count");
  rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t j = 0; j < headers_.size(); ++j) {
    if (j > 0) out += ',';
    out += csv_text(headers_[j]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += csv_cell(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  std::string out = "[";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    out += (i == 0) ? "\n" : ",\n";
    out += "  {";
    for (std::size_t j = 0; j < headers_.size(); ++j) {
      if (j > 0) out += ", ";
      out += json_text(headers_[j]);
      out += ": ";
      out += json_cell(rows_[i][j]);
    }
    out += '}';
  }
  out += rows_.empty() ? "]\n" : "\n]\n";
  return out;
}

TableFormat table_format_from(const std::string& name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "json") return TableFormat::json;
  throw ConfigError("format must be 'csv' or 'json', got '" + name + "'");
}

std::string render_table(const Table& table, TableFormat format) {
  return format == TableFormat::csv ? table.to_csv() : table.to_json();
}

void write_table(const Table& table, TableFormat format,
                 const std::string& out_path) {
  const std::string text = render_table(table, format);
  if (out_path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError("cannot open output file '" + out_path + "'");
  file << text;
  if (!file) throw ConfigError("failed writing output file '" + out_path +
                               "'");
}

}  // namespace sepdyn

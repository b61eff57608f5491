#pragma once

// Strict reader for the comma-delimited input files. Every failure carries
// the file, line and column it came from.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "physeeio/decimal.hpp"
#include "physeeio/error.hpp"

namespace physeeio::io {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  SourceLocation at(const CsvRow& row, std::size_t column = 0) const {
    return {file, row.line, column};
  }
};

namespace detail {

inline bool valid_utf8(std::string_view s, std::size_t& bad_offset) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c >> 5) == 0x6) len = 2;
    else if ((c >> 4) == 0xE) len = 3;
    else if ((c >> 3) == 0x1E) len = 4;
    else {
      bad_offset = i;
      return false;
    }
    if (i + len > s.size()) {
      bad_offset = i;
      return false;
    }
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) {
        bad_offset = i;
        return false;
      }
    }
    i += len;
  }
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

/// Splits one record; double quotes may wrap a field and "" escapes a quote.
inline std::vector<std::string> split_record(std::string_view line, const std::string& file,
                                             std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (c == ',') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::SchemaViolation, "unterminated quoted field", {file, line_no, out.size() + 1});
  }
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

}  // namespace detail

inline CsvTable parse_csv_text(std::string_view text, const std::string& file) {
  std::size_t bad = 0;
  if (!detail::valid_utf8(text, bad)) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < bad; ++i) line += text[i] == '\n';
    throw Error(ErrorCode::EncodingError, "input is not valid UTF-8", {file, line, 0});
  }
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  CsvTable table;
  table.file = file;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) {
      if (nl == text.size()) break;
      continue;
    }
    auto fields = detail::split_record(line, file, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back({line_no, std::move(fields)});
    }
    if (nl == text.size()) break;
  }
  if (!have_header) throw Error(ErrorCode::EmptyFile, "file has no header row", {file, 0, 0});
  return table;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open file", {path.string(), 0, 0});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv_text(read_file(path), path.string());
}

inline std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

/// Checks the header against `required` followed by any of `optional`, in
/// order, and that every row has the header's width. Returns the number of
/// optional columns present.
inline std::size_t expect_header(const CsvTable& t, const std::vector<std::string>& required,
                                 const std::vector<std::string>& optional = {}) {
  bool ok = t.header.size() >= required.size() &&
            t.header.size() <= required.size() + optional.size();
  for (std::size_t k = 0; ok && k < t.header.size(); ++k) {
    const auto& want = k < required.size() ? required[k] : optional[k - required.size()];
    ok = t.header[k] == want;
  }
  if (!ok) {
    auto expected = required;
    for (const auto& o : optional) expected.push_back("[" + o + "]");
    throw Error(ErrorCode::SchemaViolation,
                "header '" + join(t.header) + "' does not match expected '" + join(expected) + "'",
                {t.file, 1, 0});
  }
  for (const auto& row : t.rows) {
    if (row.fields.size() != t.header.size()) {
      throw Error(ErrorCode::SchemaViolation,
                  "expected " + std::to_string(t.header.size()) + " fields, found " +
                      std::to_string(row.fields.size()),
                  t.at(row));
    }
  }
  return t.header.size() - required.size();
}

inline const std::string& non_empty(const CsvTable& t, const CsvRow& row, std::size_t col) {
  const auto& f = row.fields[col];
  if (f.empty()) {
    throw Error(ErrorCode::SchemaViolation, "column '" + t.header[col] + "' is empty",
                t.at(row, col + 1));
  }
  return f;
}

inline double parse_number(const CsvTable& t, const CsvRow& row, std::size_t col) {
  const auto& f = non_empty(t, row, col);
  double v = 0.0;
  const char* begin = f.data();
  const char* end = f.data() + f.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v, std::chars_format::general);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::SchemaViolation,
                "column '" + t.header[col] + "' value '" + f + "' is not a number",
                t.at(row, col + 1));
  }
  return v;
}

inline double parse_non_negative(const CsvTable& t, const CsvRow& row, std::size_t col) {
  const double v = parse_number(t, row, col);
  if (v < 0.0) {
    throw Error(ErrorCode::SchemaViolation, "column '" + t.header[col] + "' must be non-negative",
                t.at(row, col + 1));
  }
  return v;
}

inline Decimal parse_decimal(const CsvTable& t, const CsvRow& row, std::size_t col) {
  const auto& f = non_empty(t, row, col);
  Decimal d;
  if (!Decimal::parse(f, d)) {
    throw Error(ErrorCode::SchemaViolation,
                "column '" + t.header[col] + "' value '" + f + "' is not a decimal number",
                t.at(row, col + 1));
  }
  if (d.is_negative()) {
    throw Error(ErrorCode::SchemaViolation, "column '" + t.header[col] + "' must be non-negative",
                t.at(row, col + 1));
  }
  return d;
}

}  // namespace physeeio::io

#pragma once

// Minimal RFC-4180 reader/writer: comma separated, double-quote quoting with
// "" escapes, CRLF or LF line endings, embedded newlines inside quotes.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace adcnet::csv {

using Row = std::vector<std::string>;

/// Parses a complete CSV document. Throws Error(MalformedCsv) on an
/// unterminated quoted field or stray characters after a closing quote.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read(std::istream& in);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Header-indexed view used by the ingestion paths.
class Table {
 public:
  explicit Table(std::vector<Row> rows);

  const Row& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  const Row& row(std::size_t i) const { return rows_[i]; }

  std::optional<std::size_t> column(std::string_view name) const;
  /// Field by column name; empty when the row is short.
  std::string_view get(std::size_t row, std::size_t col) const;

 private:
  Row header_;
  std::vector<Row> rows_;
};

}  // namespace adcnet::csv

#include "adcnet/csv.hpp"

#include <iterator>
#include <sstream>

#include "adcnet/error.hpp"

namespace adcnet::csv {

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool after_quote = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    after_quote = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
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
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled by the following '\n'
    } else if (c == '\n') {
      end_row();
      ++line;
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else {
      if (after_quote) {
        throw Error(ErrorCode::MalformedCsv,
                    "unexpected character after closing quote on line " + std::to_string(line));
      }
      field_started = true;
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::MalformedCsv, "unterminated quoted field starting before line " +
                                             std::to_string(line));
  }
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::vector<Row> read(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
  return parse(text);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

Table::Table(std::vector<Row> rows) {
  if (rows.empty()) throw Error(ErrorCode::MalformedCsv, "missing header row");
  header_ = std::move(rows.front());
  for (auto& h : header_) {
    while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
    while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
  }
  rows_.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    // A trailing blank line parses as a single empty field.
    if (rows[i].size() == 1 && rows[i][0].empty()) continue;
    rows_.push_back(std::move(rows[i]));
  }
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  return std::nullopt;
}

std::string_view Table::get(std::size_t row, std::size_t col) const {
  const Row& r = rows_[row];
  return col < r.size() ? std::string_view(r[col]) : std::string_view();
}

}  // namespace adcnet::csv

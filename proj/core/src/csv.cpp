#include "botscan/csv.hpp"

#include "botscan/error.hpp"

namespace botscan::csv {

namespace {

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& field = fields[i];
    if (!needs_quoting(field)) {
      out += field;
      continue;
    }
    out += '"';
    for (char c : field) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += '\n';
}

std::vector<Row> parse(std::string_view text, std::string_view source) {
  std::vector<Row> rows;
  std::size_t pos = 0;
  std::size_t line = 1;
  const auto fail = [&](std::size_t at_line, const std::string& what) {
    throw Error(ErrorCode::parse,
                std::string(source) + ":" + std::to_string(at_line) + ": " + what);
  };

  while (pos < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool row_done = false;
    while (!row_done) {
      field.clear();
      if (pos < text.size() && text[pos] == '"') {
        ++pos;
        while (true) {
          if (pos >= text.size()) fail(row.line, "unterminated quoted field");
          char c = text[pos++];
          if (c == '"') {
            if (pos < text.size() && text[pos] == '"') {
              field += '"';
              ++pos;
              continue;
            }
            break;
          }
          if (c == '\n') ++line;
          field += c;
        }
        if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          fail(line, "unexpected character after closing quote");
        }
      } else {
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          if (text[pos] == '"') fail(line, "quote inside unquoted field");
          field += text[pos++];
        }
      }
      row.fields.push_back(std::move(field));
      if (pos >= text.size()) {
        row_done = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else {
        if (text[pos] == '\r') ++pos;
        if (pos < text.size() && text[pos] == '\n') ++pos;
        ++line;
        row_done = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void expect_header(const std::vector<Row>& rows, const std::vector<std::string>& header,
                   std::string_view source) {
  if (rows.empty()) {
    throw Error(ErrorCode::parse, std::string(source) + ":1: missing header, expected '" +
                                      join(header) + "'");
  }
  if (rows.front().fields != header) {
    throw Error(ErrorCode::parse, std::string(source) + ":1: header mismatch, expected '" +
                                      join(header) + "' got '" + join(rows.front().fields) +
                                      "'");
  }
}

}  // namespace botscan::csv

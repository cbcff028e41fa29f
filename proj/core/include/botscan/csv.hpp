#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace botscan::csv {

/// One parsed row plus the 1-based line number on which it starts.
struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// Appends one row in the comma/double-quote dialect: fields containing a
/// comma, quote, CR or LF are quoted with embedded quotes doubled. Rows end
/// with `\n`.
void append_row(std::string& out, const std::vector<std::string>& fields);

/// Splits a whole document into rows. Throws Error(parse) on an unterminated
/// quoted field or stray characters after a closing quote, naming `source`
/// and the line. A trailing newline does not produce an empty row.
std::vector<Row> parse(std::string_view text, std::string_view source);

/// Verifies that the first row equals `header` exactly; throws Error(parse)
/// naming `source` otherwise.
void expect_header(const std::vector<Row>& rows, const std::vector<std::string>& header,
                   std::string_view source);

}  // namespace botscan::csv

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqlpbe/errors.hpp"
#include "sqlpbe/table.hpp"

namespace sqlpbe {

class ParseError : public Error {
 public:
  using Error::Error;
};

struct CsvCell {
  std::string text;
  /// Quoted fields keep an empty string; unquoted empty fields are Null.
  bool quoted = false;
};

using CsvRecord = std::vector<CsvCell>;

/// RFC 4180: comma separated, double-quote quoting with "" escapes, CRLF or LF
/// line ends. Every record must have as many fields as the first.
std::vector<CsvRecord> parse_csv(std::string_view text);

std::string write_csv(const Table& t);

}  // namespace sqlpbe

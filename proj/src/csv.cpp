#include "sqlpbe/csv.hpp"

namespace sqlpbe {

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord record;
  CsvCell cell;
  std::size_t line = 1;
  std::size_t i = 0;
  bool at_field_start = true;
  bool record_started = false;

  auto end_field = [&] {
    record.push_back(std::move(cell));
    cell = CsvCell{};
    at_field_start = true;
  };
  auto end_record = [&] {
    end_field();
    if (!records.empty() && record.size() != records.front().size()) {
      throw ParseError("line " + std::to_string(line) + ": expected " + std::to_string(records.front().size()) +
                       " fields, found " + std::to_string(record.size()));
    }
    records.push_back(std::move(record));
    record.clear();
    record_started = false;
  };

  if (text.starts_with("\xEF\xBB\xBF")) i = 3;
  while (i < text.size()) {
    const char c = text[i];
    if (at_field_start && c == '"') {
      cell.quoted = true;
      record_started = true;
      ++i;
      while (true) {
        if (i >= text.size()) throw ParseError("line " + std::to_string(line) + ": unterminated quoted field");
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            cell.text += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        cell.text += text[i++];
      }
      at_field_start = false;
      if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        throw ParseError("line " + std::to_string(line) + ": text after closing quote");
      }
      continue;
    }
    if (c == ',') {
      end_field();
      record_started = true;
      ++i;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      if (record_started || !at_field_start || !cell.text.empty()) end_record();
      ++line;
    } else {
      if (cell.quoted) throw ParseError("line " + std::to_string(line) + ": text after closing quote");
      cell.text += c;
      at_field_start = false;
      record_started = true;
      ++i;
    }
  }
  if (record_started || !cell.text.empty()) end_record();
  return records;
}

namespace {

std::string csv_field(const std::string& s, bool force_quote) {
  const bool needs = force_quote || s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string write_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.schema.size(); ++c) out += (c ? "," : "") + csv_field(t.schema[c].name, false);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (row[c].is_null()) continue;
      const std::string s = row[c].to_string();
      out += csv_field(s, s.empty());
    }
    out += '\n';
  }
  return out;
}

}  // namespace sqlpbe

#include "sqlpbe/instance.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace sqlpbe {

namespace {

using nlohmann::json;

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty() || s.front() == '+') return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true") return true;
  if (lower == "false") return false;
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingTable("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<CsvRecord> records_from_json(const json& spec) {
  std::vector<CsvRecord> records;
  CsvRecord header;
  for (const auto& c : spec.at("columns")) header.push_back(CsvCell{c.get<std::string>(), true});
  records.push_back(std::move(header));
  for (const auto& row : spec.value("rows", json::array())) {
    if (!row.is_array() || row.size() != records.front().size()) {
      throw ParseError("inline row does not match the column list");
    }
    CsvRecord rec;
    for (const auto& cell : row) {
      if (cell.is_null()) {
        rec.push_back(CsvCell{});
      } else if (cell.is_string()) {
        rec.push_back(CsvCell{cell.get<std::string>(), true});
      } else if (cell.is_boolean()) {
        rec.push_back(CsvCell{cell.get<bool>() ? "true" : "false", false});
      } else if (cell.is_number_integer()) {
        rec.push_back(CsvCell{cell.dump(), false});
      } else if (cell.is_number()) {
        rec.push_back(CsvCell{format_real(cell.get<double>()), false});
      } else {
        throw ParseError("unsupported inline cell " + cell.dump());
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<CsvRecord> load_records(const json& spec, const std::filesystem::path& base_dir) {
  if (spec.is_string()) {
    const auto path = base_dir / spec.get<std::string>();
    if (!std::filesystem::exists(path)) throw MissingTable("table file not found: " + path.string());
    return parse_csv(read_file(path));
  }
  if (spec.is_object() && spec.contains("path")) return load_records(spec.at("path"), base_dir);
  if (spec.is_object() && spec.contains("columns")) return records_from_json(spec);
  throw ParseError("table entry needs a path or inline columns");
}

std::pair<std::string, std::string> split_qualified(const std::string& s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size()) {
    throw ParseError("expected table.column, got '" + s + "'");
  }
  return {s.substr(0, dot), s.substr(dot + 1)};
}

Value constant_from_json(const json& j) {
  if (j.is_string()) return parse_constant(j.get<std::string>());
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_number()) return Value::real(j.get<double>());
  throw ParseError("unsupported constant " + j.dump());
}

}  // namespace

bool is_iso_datetime(std::string_view s) {
  static const std::regex pattern(R"((\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?)?)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, pattern)) return false;
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  const std::chrono::year_month_day date{std::chrono::year{num(1)},
                                         std::chrono::month{static_cast<unsigned>(num(2))},
                                         std::chrono::day{static_cast<unsigned>(num(3))}};
  if (!date.ok()) return false;
  if (m[4].matched && (num(4) > 23 || num(5) > 59)) return false;
  if (m[6].matched && num(6) > 59) return false;
  return true;
}

ValueType infer_type(const std::vector<std::string>& cells) {
  bool any = false, all_int = true, all_real = true, all_date = true, all_bool = true;
  for (const auto& c : cells) {
    if (c.empty()) continue;
    any = true;
    all_int = all_int && parse_int(c).has_value();
    all_real = all_real && parse_real(c).has_value();
    all_date = all_date && is_iso_datetime(c);
    all_bool = all_bool && parse_bool(c).has_value();
  }
  if (!any) return ValueType::Text;
  if (all_int) return ValueType::Integer;
  if (all_real) return ValueType::Real;
  if (all_date) return ValueType::DateTime;
  if (all_bool) return ValueType::Boolean;
  return ValueType::Text;
}

Value parse_value(std::string_view text, ValueType type) {
  auto fail = [&]() -> Value {
    throw ParseError("'" + std::string(text) + "' is not a valid " + std::string(type_name(type)));
  };
  switch (type) {
    case ValueType::Null: return Value::null();
    case ValueType::Integer:
      if (auto v = parse_int(text)) return Value::integer(*v);
      return fail();
    case ValueType::Real:
      if (auto v = parse_real(text)) return Value::real(*v);
      return fail();
    case ValueType::DateTime:
      if (is_iso_datetime(text)) return Value::datetime(std::string(text));
      return fail();
    case ValueType::Boolean:
      if (auto v = parse_bool(text)) return Value::boolean(*v);
      return fail();
    case ValueType::Text: return Value::text(std::string(text));
  }
  return fail();
}

Value parse_constant(std::string_view text) {
  const std::string s(text);
  return parse_value(s, infer_type({s}));
}

Table table_from_csv(const std::vector<CsvRecord>& records,
                     const std::function<std::optional<ValueType>(const std::string&)>& type_of) {
  if (records.empty()) throw ParseError("missing header row");
  const CsvRecord& header = records.front();
  std::vector<Column> cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c].text;
    std::optional<ValueType> declared = type_of ? type_of(name) : std::nullopt;
    ValueType type;
    if (declared) {
      type = *declared;
    } else {
      std::vector<std::string> cells;
      bool quoted_empty = false;
      for (std::size_t r = 1; r < records.size(); ++r) {
        cells.push_back(records[r][c].text);
        quoted_empty = quoted_empty || (records[r][c].quoted && records[r][c].text.empty());
      }
      type = quoted_empty ? ValueType::Text : infer_type(cells);
    }
    cols.push_back(Column{name, type});
  }
  Table t{Schema(cols), {}};
  for (std::size_t r = 1; r < records.size(); ++r) {
    Row row;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const CsvCell& cell = records[r][c];
      if (cell.text.empty() && !(cell.quoted && cols[c].type == ValueType::Text)) {
        row.push_back(Value::null());
      } else {
        row.push_back(parse_value(cell.text, cols[c].type));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Instance instance_from_json(const json& m, const std::filesystem::path& base_dir) {
  try {
    Instance inst;
    inst.id = m.value("id", std::string());
    const json types = m.value("types", json::object());
    for (const auto& [key, tag] : types.items()) {
      auto t = parse_type_name(tag.get<std::string>());
      if (!t) throw ParseError("unknown type '" + tag.get<std::string>() + "' for " + key);
      inst.declared_types[key] = *t;
    }
    auto declared = [&](const std::string& table) {
      return [&, table](const std::string& col) -> std::optional<ValueType> {
        if (auto it = inst.declared_types.find(table + "." + col); it != inst.declared_types.end()) return it->second;
        if (auto it = inst.declared_types.find(col); it != inst.declared_types.end()) return it->second;
        return std::nullopt;
      };
    };

    if (!m.contains("inputs") || !m.at("inputs").is_array() || m.at("inputs").empty()) {
      throw ParseError("manifest has no inputs");
    }
    for (const auto& in : m.at("inputs")) {
      const std::string name = in.at("name").get<std::string>();
      if (find_table(inst.inputs, name)) throw SchemaError("duplicate input table '" + name + "'");
      Table t = table_from_csv(load_records(in, base_dir), declared(name));
      inst.inputs.push_back(NamedTable{name, std::make_shared<const Table>(std::move(t))});
    }
    if (!m.contains("output")) throw ParseError("manifest has no output");
    inst.output = table_from_csv(load_records(m.at("output"), base_dir), declared(""));
    if (inst.output.rows.empty()) throw EmptyOutput("expected output has no rows");

    for (const auto& c : m.value("constants", json::array())) inst.constants.push_back(constant_from_json(c));
    for (const auto& a : m.value("aggregators", json::array())) {
      auto fns = parse_aggregate(a.get<std::string>());
      if (fns.empty()) throw ParseError("unknown aggregator '" + a.get<std::string>() + "'");
      for (auto fn : fns) {
        if (std::find(inst.aggregators.begin(), inst.aggregators.end(), fn) == inst.aggregators.end()) {
          inst.aggregators.push_back(fn);
        }
      }
    }
    auto column_exists = [&](const std::string& table, const std::string& col) {
      for (const auto& t : inst.inputs) {
        if ((table.empty() || t.name == table) && t.table->schema.contains(col)) return true;
      }
      return false;
    };
    for (const auto& c : m.value("comparison_columns", json::array())) {
      std::string name = c.get<std::string>();
      if (!column_exists("", name)) throw SchemaError("comparison column '" + name + "' is not an input column");
      inst.comparison_columns.push_back(std::move(name));
    }
    for (const auto& fk : m.value("foreign_keys", json::array())) {
      auto [ft, fc] = split_qualified(fk.at("from").get<std::string>());
      auto [tt, tc] = split_qualified(fk.at("to").get<std::string>());
      if (!column_exists(ft, fc) || !column_exists(tt, tc)) {
        throw SchemaError("foreign key endpoint missing: " + ft + "." + fc + " -> " + tt + "." + tc);
      }
      inst.foreign_keys.push_back(ForeignKey{ft, fc, tt, tc});
    }
    if (m.contains("ground_truth")) {
      inst.ground_truth = m.at("ground_truth").get<std::string>();
    } else if (m.contains("ground_truth_path")) {
      inst.ground_truth = read_file(base_dir / m.at("ground_truth_path").get<std::string>());
    }
    for (const auto& c : m.value("candidates", json::array())) inst.candidates.push_back(c.get<std::string>());
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

Instance load_instance(const std::filesystem::path& manifest_path) {
  if (!std::filesystem::exists(manifest_path)) throw MissingTable("manifest not found: " + manifest_path.string());
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  Instance inst = instance_from_json(m, manifest_path.parent_path());
  if (inst.id.empty()) inst.id = manifest_path.parent_path().filename().string();
  return inst;
}

json table_to_json(const Table& t) {
  json cols = json::array();
  for (const auto& c : t.schema) cols.push_back(c.name);
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& v : row) {
      switch (v.type()) {
        case ValueType::Null: r.push_back(nullptr); break;
        case ValueType::Integer: r.push_back(v.as_integer()); break;
        case ValueType::Real: r.push_back(v.as_real()); break;
        case ValueType::Boolean: r.push_back(v.as_boolean()); break;
        default: r.push_back(v.to_string()); break;
      }
    }
    rows.push_back(std::move(r));
  }
  return json{{"columns", cols}, {"rows", rows}};
}

}  // namespace sqlpbe

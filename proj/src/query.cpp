#include "sqlpbe/query.hpp"

#include <algorithm>
#include <cctype>

#include "sqlpbe/instance.hpp"
#include "sqlpbe/sql.hpp"

namespace sqlpbe {

Query Query::program(Program p, std::optional<Projection> projection) {
  Query q;
  q.body_ = ProgramQuery{std::move(p), std::move(projection)};
  return q;
}

Query Query::sql(std::string text) {
  Query q;
  q.body_ = std::move(text);
  return q;
}

Table Query::run(const Database& db, std::optional<std::chrono::milliseconds> budget) const {
  if (auto* p = std::get_if<ProgramQuery>(&body_)) {
    Table out = run_program(p->program, db);
    return p->projection ? project(out, *p->projection) : out;
  }
  SqliteDatabase sqlite(db);
  return sqlite.query(std::get<std::string>(body_), budget);
}

std::vector<Value> Query::constants() const {
  if (auto* p = std::get_if<ProgramQuery>(&body_)) return program_constants(p->program);
  return sql_constants(std::get<std::string>(body_));
}

std::string Query::to_sql(const Database& db) const {
  if (auto* p = std::get_if<ProgramQuery>(&body_)) {
    return p->projection ? sqlpbe::to_sql(p->program, db, *p->projection) : sqlpbe::to_sql(p->program, db);
  }
  return std::get<std::string>(body_);
}

std::string Query::text() const {
  if (auto* p = std::get_if<ProgramQuery>(&body_)) return to_string(p->program);
  return std::get<std::string>(body_);
}

std::vector<Value> program_constants(const Program& p) {
  std::vector<Value> out;
  for (const auto& line : p.lines) {
    if (!line.filter) continue;
    for (const auto& atom : line.filter->atoms) {
      if (auto* v = std::get_if<Value>(&atom.rhs); v && std::find(out.begin(), out.end(), *v) == out.end()) {
        out.push_back(*v);
      }
    }
  }
  return out;
}

std::vector<Value> sql_constants(std::string_view sql) {
  std::vector<Value> out;
  auto add = [&](Value v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  };
  auto word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; };
  for (std::size_t i = 0; i < sql.size();) {
    const char c = sql[i];
    if (c == '"' || c == '`' || c == '[') {
      const char close = c == '[' ? ']' : c;
      i = sql.find(close, i + 1);
      i = i == std::string_view::npos ? sql.size() : i + 1;
    } else if (c == '\'') {
      std::string text;
      ++i;
      while (i < sql.size()) {
        if (sql[i] == '\'') {
          if (i + 1 < sql.size() && sql[i + 1] == '\'') {
            text += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        text += sql[i++];
      }
      add(is_iso_datetime(text) ? Value::datetime(text) : Value::text(text));
    } else if (std::isdigit(static_cast<unsigned char>(c)) && (i == 0 || !word_char(sql[i - 1]))) {
      std::size_t j = i;
      while (j < sql.size() && (std::isdigit(static_cast<unsigned char>(sql[j])) || sql[j] == '.')) ++j;
      if (j < sql.size() && (std::isalpha(static_cast<unsigned char>(sql[j])) || sql[j] == '_')) {
        i = j;
        continue;
      }
      std::string num(sql.substr(i, j - i));
      const bool negative = i > 0 && sql[i - 1] == '-' && (i < 2 || !word_char(sql[i - 2]));
      if (negative) num = "-" + num;
      try {
        add(parse_constant(num));
      } catch (const ParseError&) {
      }
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace sqlpbe

#include <algorithm>
#include <cmath>
#include <sqlite3.h>

#include "sqlpbe/sql.hpp"

namespace sqlpbe {

namespace {

class Statement {
 public:
  Statement(sqlite3* db, const std::string& sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.c_str(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
      throw SqlError(std::string(sqlite3_errmsg(db)) + " in: " + sql);
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  sqlite3_stmt* get() const { return stmt_; }

  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_INTERRUPT) throw QueryTimeout("query budget elapsed");
    throw SqlError(sqlite3_errmsg(db_));
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "sqlite error";
    sqlite3_free(err);
    throw SqlError(msg);
  }
}

std::string_view declared_type(ValueType t) {
  switch (t) {
    case ValueType::Integer:
    case ValueType::Boolean: return "INTEGER";
    case ValueType::Real: return "REAL";
    default: return "TEXT";
  }
}

void bind(sqlite3_stmt* stmt, int i, const Value& v) {
  switch (v.type()) {
    case ValueType::Null: sqlite3_bind_null(stmt, i); break;
    case ValueType::Integer: sqlite3_bind_int64(stmt, i, v.as_integer()); break;
    case ValueType::Real: sqlite3_bind_double(stmt, i, v.as_real()); break;
    case ValueType::Boolean: sqlite3_bind_int64(stmt, i, v.as_boolean() ? 1 : 0); break;
    case ValueType::Text: sqlite3_bind_text(stmt, i, v.as_text().c_str(), -1, SQLITE_TRANSIENT); break;
    case ValueType::DateTime:
      sqlite3_bind_text(stmt, i, v.as_datetime().iso.c_str(), -1, SQLITE_TRANSIENT);
      break;
  }
}

struct Deadline {
  std::chrono::steady_clock::time_point at;
};

int check_deadline(void* p) {
  return std::chrono::steady_clock::now() > static_cast<Deadline*>(p)->at ? 1 : 0;
}

}  // namespace

SqliteDatabase::SqliteDatabase() {
  if (sqlite3_open(":memory:", &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "cannot open sqlite";
    sqlite3_close(db_);
    throw SqlError(msg);
  }
}

SqliteDatabase::SqliteDatabase(const Database& tables) : SqliteDatabase() {
  for (const auto& t : tables) load(t);
}

SqliteDatabase::~SqliteDatabase() { sqlite3_close(db_); }

void SqliteDatabase::load(const NamedTable& t) {
  const Table& table = *t.table;
  std::string create = "CREATE TABLE " + quote_identifier(t.name) + " (";
  std::string insert = "INSERT INTO " + quote_identifier(t.name) + " VALUES (";
  for (std::size_t c = 0; c < table.schema.size(); ++c) {
    create += (c ? ", " : "") + quote_identifier(table.schema[c].name) + " " +
              std::string(declared_type(table.schema[c].type));
    insert += c ? ", ?" : "?";
  }
  exec(db_, create + ")");
  exec(db_, "BEGIN");
  Statement stmt(db_, insert + ")");
  for (const auto& row : table.rows) {
    sqlite3_reset(stmt.get());
    for (std::size_t c = 0; c < row.size(); ++c) bind(stmt.get(), static_cast<int>(c + 1), row[c]);
    stmt.step();
  }
  exec(db_, "COMMIT");
}

Table SqliteDatabase::query(const std::string& sql, std::optional<std::chrono::milliseconds> budget) {
  Deadline deadline;
  if (budget) {
    deadline.at = std::chrono::steady_clock::now() + *budget;
    sqlite3_progress_handler(db_, 1000, check_deadline, &deadline);
  }
  struct ClearHandler {
    sqlite3* db;
    ~ClearHandler() { sqlite3_progress_handler(db, 0, nullptr, nullptr); }
  } clear{db_};

  Statement stmt(db_, sql);
  const int ncols = sqlite3_column_count(stmt.get());
  std::vector<std::string> names;
  for (int c = 0; c < ncols; ++c) names.emplace_back(sqlite3_column_name(stmt.get(), c));

  std::vector<Row> rows;
  while (stmt.step()) {
    Row row;
    row.reserve(ncols);
    for (int c = 0; c < ncols; ++c) {
      switch (sqlite3_column_type(stmt.get(), c)) {
        case SQLITE_INTEGER: row.push_back(Value::integer(sqlite3_column_int64(stmt.get(), c))); break;
        case SQLITE_FLOAT: row.push_back(Value::real(sqlite3_column_double(stmt.get(), c))); break;
        case SQLITE_NULL: row.push_back(Value::null()); break;
        default:
          row.push_back(Value::text(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), c))));
          break;
      }
    }
    rows.push_back(std::move(row));
  }

  std::vector<Column> cols;
  for (int c = 0; c < ncols; ++c) {
    std::optional<ValueType> type;
    for (auto& row : rows) {
      const ValueType t = row[c].type();
      if (t == ValueType::Null) continue;
      if (!type) {
        type = t;
      } else if (*type != t) {
        if (is_numeric(*type) && is_numeric(t)) {
          type = ValueType::Real;
        } else {
          type = ValueType::Text;
        }
      }
    }
    if (!type) {
      const char* decl = sqlite3_column_decltype(stmt.get(), c);
      const std::string d = decl ? decl : "";
      type = d == "INTEGER" ? ValueType::Integer : d == "REAL" ? ValueType::Real : ValueType::Text;
    }
    for (auto& row : rows) {
      Value& v = row[c];
      if (v.is_null() || v.type() == *type) continue;
      if (*type == ValueType::Real) {
        v = Value::real(*v.numeric());
      } else {
        v = Value::text(v.to_string());
      }
    }
    std::string name = names[c];
    for (int k = 2; std::any_of(cols.begin(), cols.end(), [&](const Column& x) { return x.name == name; }); ++k) {
      name = names[c] + ":" + std::to_string(k);
    }
    cols.push_back(Column{name, *type});
  }
  return Table{Schema(std::move(cols)), std::move(rows)};
}

Table coerce_like(const Table& t, const Schema& expected) {
  if (t.schema.size() != expected.size()) return t;
  Table out = t;
  std::vector<Column> cols = t.schema.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const ValueType want = expected[c].type;
    const ValueType have = cols[c].type;
    if (want == have) continue;
    bool ok = true;
    for (const auto& row : t.rows) {
      const Value& v = row[c];
      if (v.is_null()) continue;
      if (want == ValueType::Boolean) ok = ok && v.type() == ValueType::Integer && (v.as_integer() == 0 || v.as_integer() == 1);
      else if (want == ValueType::DateTime) ok = ok && v.type() == ValueType::Text;
      else if (want == ValueType::Real) ok = ok && is_numeric(v.type());
      else if (want == ValueType::Integer) ok = ok && v.type() == ValueType::Real && std::trunc(v.as_real()) == v.as_real();
      else ok = false;
    }
    if (!ok) continue;
    cols[c].type = want;
    for (auto& row : out.rows) {
      Value& v = row[c];
      if (v.is_null()) continue;
      switch (want) {
        case ValueType::Boolean: v = Value::boolean(v.as_integer() != 0); break;
        case ValueType::DateTime: v = Value::datetime(v.as_text()); break;
        case ValueType::Real: v = Value::real(*v.numeric()); break;
        case ValueType::Integer: v = Value::integer(static_cast<std::int64_t>(v.as_real())); break;
        default: break;
      }
    }
  }
  out.schema = Schema(std::move(cols));
  return out;
}

}  // namespace sqlpbe

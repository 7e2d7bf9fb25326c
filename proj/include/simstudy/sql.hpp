#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "simstudy/datum.hpp"

namespace simstudy {

enum class Backend { sqlite, postgres };

const char* to_string(Backend b);

/// Parsed connection descriptor.
///   sqlite:<path>, sqlite://<path>, or a bare path  -> embedded file engine
///   postgresql://..., postgres://..., pg:<conninfo> -> PostgreSQL server
struct Dsn {
    Backend backend;
    std::string target;  // file path or libpq conninfo

    static Dsn parse(std::string_view text);
};

using SqlValue = std::variant<std::monostate, std::int64_t, double, std::string, Bytes>;
using SqlRow = std::vector<SqlValue>;

struct ColumnInfo {
    std::string name;
    std::string type;  // declared type, lower-case
};

/// One connection to a SQL engine. Not thread-safe; one owner at a time.
/// Transient failures (engine unreachable, busy, dropped connection) raise
/// ConnectionError; everything else raises StorageError.
class SqlConnection {
public:
    virtual ~SqlConnection() = default;

    virtual Backend backend() const noexcept = 0;

    /// Runs a statement, returns affected row count.
    virtual std::int64_t execute(std::string_view sql, std::span<const SqlValue> params = {}) = 0;
    virtual std::vector<SqlRow> query(std::string_view sql, std::span<const SqlValue> params = {}) = 0;

    /// Opens a transaction that serializes with every other writer using the
    /// same `lock_key`.
    virtual void begin_write(std::string_view lock_key) = 0;
    virtual void begin_read() = 0;
    virtual void commit() = 0;
    virtual void rollback() noexcept = 0;
    virtual bool in_transaction() const noexcept = 0;

    /// Positional parameter marker, 1-based.
    virtual std::string placeholder(int index) const = 0;

    /// Empty when the table does not exist.
    virtual std::vector<ColumnInfo> table_columns(const std::string& table) = 0;
};

std::unique_ptr<SqlConnection> open_connection(const Dsn& dsn);

std::unique_ptr<SqlConnection> open_sqlite(const std::string& path);
#ifdef SIMSTUDY_HAVE_POSTGRES
std::unique_ptr<SqlConnection> open_postgres(const std::string& conninfo);
#endif

/// Rolls back unless commit() was called.
class Transaction {
public:
    enum class Mode { read, write };

    Transaction(SqlConnection& conn, Mode mode, std::string_view lock_key = {});
    ~Transaction();
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;

    void commit();

private:
    SqlConnection& conn_;
    bool done_ = false;
};

/// Double-quoted SQL identifier.
std::string quote_ident(std::string_view name);

}  // namespace simstudy

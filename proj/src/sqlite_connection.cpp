#include <sqlite3.h>

#include <algorithm>
#include <cctype>

#include "simstudy/errors.hpp"
#include "simstudy/sql.hpp"

namespace simstudy {

namespace {

class Statement {
public:
    Statement(sqlite3* db, std::string_view sql) {
        const char* tail = nullptr;
        const int rc = sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, &tail);
        if (rc != SQLITE_OK) raise(db, rc, sql);
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    sqlite3_stmt* get() const noexcept { return stmt_; }

    [[noreturn]] static void raise(sqlite3* db, int rc, std::string_view sql) {
        std::string msg = std::string("sqlite: ") + sqlite3_errmsg(db) + " [" + std::string(sql.substr(0, 120)) + "]";
        switch (rc & 0xff) {
            case SQLITE_BUSY:
            case SQLITE_LOCKED: throw ConnectionError(msg);
            default: throw StorageError(msg);
        }
    }

private:
    sqlite3_stmt* stmt_ = nullptr;
};

class SqliteConnection final : public SqlConnection {
public:
    explicit SqliteConnection(const std::string& path) {
        const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX;
        const int rc = sqlite3_open_v2(path.c_str(), &db_, flags, nullptr);
        if (rc != SQLITE_OK) {
            std::string msg = db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
            sqlite3_close(db_);
            throw DsnError("cannot open database file '" + path + "': " + msg);
        }
        sqlite3_busy_timeout(db_, 30'000);
        try {
            // WAL lets readers proceed while one writer commits; NORMAL sync
            // keeps commits atomic and durable across process crashes.
            if (path != ":memory:") query("PRAGMA journal_mode=WAL", {});
            execute("PRAGMA synchronous=NORMAL", {});
            execute("PRAGMA foreign_keys=ON", {});
        } catch (const StorageError& e) {
            sqlite3_close(db_);
            throw DsnError("cannot use database file '" + path + "': " + e.what());
        }
    }

    ~SqliteConnection() override {
        if (in_tx_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        sqlite3_close_v2(db_);
    }

    Backend backend() const noexcept override { return Backend::sqlite; }

    std::int64_t execute(std::string_view sql, std::span<const SqlValue> params) override {
        Statement stmt(db_, sql);
        bind(stmt, params);
        int rc;
        while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
        }
        if (rc != SQLITE_DONE) Statement::raise(db_, rc, sql);
        return sqlite3_changes(db_);
    }

    std::vector<SqlRow> query(std::string_view sql, std::span<const SqlValue> params) override {
        Statement stmt(db_, sql);
        bind(stmt, params);
        std::vector<SqlRow> rows;
        int rc;
        while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
            const int n = sqlite3_column_count(stmt.get());
            SqlRow row;
            row.reserve(static_cast<std::size_t>(n));
            for (int c = 0; c < n; ++c) row.push_back(column(stmt.get(), c));
            rows.push_back(std::move(row));
        }
        if (rc != SQLITE_DONE) Statement::raise(db_, rc, sql);
        return rows;
    }

    void begin_write(std::string_view) override {
        execute("BEGIN IMMEDIATE", {});
        in_tx_ = true;
    }

    void begin_read() override {
        execute("BEGIN", {});
        in_tx_ = true;
    }

    void commit() override {
        execute("COMMIT", {});
        in_tx_ = false;
    }

    void rollback() noexcept override {
        if (in_tx_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        in_tx_ = false;
    }

    bool in_transaction() const noexcept override { return in_tx_; }

    std::string placeholder(int index) const override { return "?" + std::to_string(index); }

    std::vector<ColumnInfo> table_columns(const std::string& table) override {
        std::vector<ColumnInfo> out;
        for (const auto& row : query("PRAGMA table_info(" + quote_ident(table) + ")", {})) {
            ColumnInfo info{std::get<std::string>(row.at(1)), std::get<std::string>(row.at(2))};
            std::transform(info.type.begin(), info.type.end(), info.type.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            out.push_back(std::move(info));
        }
        return out;
    }

private:
    void bind(Statement& stmt, std::span<const SqlValue> params) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const int idx = static_cast<int>(i) + 1;
            const int rc = std::visit(
                [&](const auto& v) -> int {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) return sqlite3_bind_null(stmt.get(), idx);
                    else if constexpr (std::is_same_v<T, std::int64_t>) return sqlite3_bind_int64(stmt.get(), idx, v);
                    else if constexpr (std::is_same_v<T, double>) return sqlite3_bind_double(stmt.get(), idx, v);
                    else if constexpr (std::is_same_v<T, std::string>)
                        return sqlite3_bind_text64(stmt.get(), idx, v.data(), v.size(), SQLITE_TRANSIENT,
                                                   SQLITE_UTF8);
                    else
                        return sqlite3_bind_blob64(stmt.get(), idx, v.data(), v.size(), SQLITE_TRANSIENT);
                },
                params[i]);
            if (rc != SQLITE_OK) Statement::raise(db_, rc, "bind");
        }
    }

    static SqlValue column(sqlite3_stmt* stmt, int c) {
        switch (sqlite3_column_type(stmt, c)) {
            case SQLITE_INTEGER: return std::int64_t{sqlite3_column_int64(stmt, c)};
            case SQLITE_FLOAT: return sqlite3_column_double(stmt, c);
            case SQLITE_TEXT: {
                const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt, c));
                return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt, c)));
            }
            case SQLITE_BLOB: {
                const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(stmt, c));
                const auto n = static_cast<std::size_t>(sqlite3_column_bytes(stmt, c));
                return p ? Bytes(p, p + n) : Bytes{};
            }
            default: return std::monostate{};
        }
    }

    sqlite3* db_ = nullptr;
    bool in_tx_ = false;
};

}  // namespace

std::unique_ptr<SqlConnection> open_sqlite(const std::string& path) {
    return std::make_unique<SqliteConnection>(path);
}

}  // namespace simstudy

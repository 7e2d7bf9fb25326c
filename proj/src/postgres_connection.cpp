#include <libpq-fe.h>

#include <charconv>
#include <cmath>
#include <cstring>

#include "simstudy/errors.hpp"
#include "simstudy/sql.hpp"
#include "simstudy/value.hpp"

namespace simstudy {

namespace {

// pg_type OIDs used when decoding text-format results.
constexpr Oid kBoolOid = 16;
constexpr Oid kByteaOid = 17;
constexpr Oid kInt8Oid = 20;
constexpr Oid kInt2Oid = 21;
constexpr Oid kInt4Oid = 23;
constexpr Oid kFloat4Oid = 700;
constexpr Oid kFloat8Oid = 701;
constexpr Oid kNumericOid = 1700;

struct ResultDeleter {
    void operator()(PGresult* r) const noexcept { PQclear(r); }
};
using ResultPtr = std::unique_ptr<PGresult, ResultDeleter>;

bool transient_sqlstate(std::string_view state) {
    // 08: connection exception, 57P0x: server shutdown, 40001/40P01: serialization/deadlock
    return state.substr(0, 2) == "08" || state == "57P01" || state == "57P02" || state == "57P03" ||
           state == "40001" || state == "40P01" || state == "53300";
}

std::string format_param(const SqlValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        if (std::isnan(*d)) return "NaN";
        if (std::isinf(*d)) return *d > 0 ? "Infinity" : "-Infinity";
        return format_double(*d);
    }
    return std::get<std::string>(v);
}

double parse_float(const char* s) {
    if (std::strcmp(s, "NaN") == 0) return NAN;
    if (std::strcmp(s, "Infinity") == 0) return INFINITY;
    if (std::strcmp(s, "-Infinity") == 0) return -INFINITY;
    double d = 0;
    auto r = std::from_chars(s, s + std::strlen(s), d);
    if (r.ec != std::errc{}) throw StorageError(std::string("postgres: bad float '") + s + "'");
    return d;
}

class PostgresConnection final : public SqlConnection {
public:
    explicit PostgresConnection(std::string conninfo) : conninfo_(std::move(conninfo)) { connect(); }

    ~PostgresConnection() override {
        if (conn_) PQfinish(conn_);
    }

    Backend backend() const noexcept override { return Backend::postgres; }

    std::int64_t execute(std::string_view sql, std::span<const SqlValue> params) override {
        ResultPtr res = run(sql, params);
        const char* n = PQcmdTuples(res.get());
        return (n && *n) ? std::stoll(n) : 0;
    }

    std::vector<SqlRow> query(std::string_view sql, std::span<const SqlValue> params) override {
        ResultPtr res = run(sql, params);
        const int nrows = PQntuples(res.get());
        const int ncols = PQnfields(res.get());
        std::vector<SqlRow> rows;
        rows.reserve(static_cast<std::size_t>(nrows));
        for (int r = 0; r < nrows; ++r) {
            SqlRow row;
            row.reserve(static_cast<std::size_t>(ncols));
            for (int c = 0; c < ncols; ++c) row.push_back(decode(res.get(), r, c));
            rows.push_back(std::move(row));
        }
        return rows;
    }

    void begin_write(std::string_view lock_key) override {
        execute("BEGIN", {});
        in_tx_ = true;
        if (!lock_key.empty()) {
            const SqlValue key{std::string(lock_key)};
            query("SELECT pg_advisory_xact_lock(hashtext($1))", std::span(&key, 1));
        }
    }

    void begin_read() override {
        execute("BEGIN", {});
        in_tx_ = true;
    }

    void commit() override {
        in_tx_ = false;
        execute("COMMIT", {});
    }

    void rollback() noexcept override {
        if (!in_tx_) return;
        in_tx_ = false;
        if (conn_ && PQstatus(conn_) == CONNECTION_OK) PQclear(PQexec(conn_, "ROLLBACK"));
    }

    bool in_transaction() const noexcept override { return in_tx_; }

    std::string placeholder(int index) const override { return "$" + std::to_string(index); }

    std::vector<ColumnInfo> table_columns(const std::string& table) override {
        const SqlValue name{table};
        std::vector<ColumnInfo> out;
        for (const auto& row : query("SELECT column_name, data_type FROM information_schema.columns "
                                     "WHERE table_schema = current_schema() AND table_name = $1 "
                                     "ORDER BY ordinal_position",
                                     std::span(&name, 1)))
            out.push_back({std::get<std::string>(row.at(0)), std::get<std::string>(row.at(1))});
        return out;
    }

private:
    void connect() {
        if (conn_) PQfinish(conn_);
        conn_ = PQconnectdb(conninfo_.c_str());
        if (!conn_ || PQstatus(conn_) != CONNECTION_OK) {
            std::string msg = conn_ ? PQerrorMessage(conn_) : "out of memory";
            PQfinish(conn_);
            conn_ = nullptr;
            throw ConnectionError("postgres: cannot connect: " + msg);
        }
        PQclear(PQexec(conn_, "SET TIME ZONE 'UTC'"));
        PQclear(PQexec(conn_, "SET client_min_messages = warning"));
    }

    ResultPtr run(std::string_view sql, std::span<const SqlValue> params) {
        if (!conn_ || PQstatus(conn_) != CONNECTION_OK) {
            // a transaction cannot survive a reconnect
            if (in_tx_) {
                in_tx_ = false;
                throw ConnectionError("postgres: connection lost inside a transaction");
            }
            connect();
        }

        std::vector<std::string> text(params.size());
        std::vector<const char*> values(params.size());
        std::vector<int> lengths(params.size()), formats(params.size());
        std::vector<Oid> types(params.size(), 0);
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (std::holds_alternative<std::monostate>(params[i])) {
                values[i] = nullptr;
            } else if (const auto* b = std::get_if<Bytes>(&params[i])) {
                values[i] = reinterpret_cast<const char*>(b->data());
                lengths[i] = static_cast<int>(b->size());
                formats[i] = 1;
                types[i] = kByteaOid;
            } else {
                text[i] = format_param(params[i]);
                values[i] = text[i].c_str();
            }
        }
        const std::string stmt(sql);
        PGresult* raw = PQexecParams(conn_, stmt.c_str(), static_cast<int>(params.size()), types.data(),
                                     values.data(), lengths.data(), formats.data(), 0);
        ResultPtr res(raw);
        const ExecStatusType st = res ? PQresultStatus(res.get()) : PGRES_FATAL_ERROR;
        if (st == PGRES_COMMAND_OK || st == PGRES_TUPLES_OK) return res;

        const char* state = res ? PQresultErrorField(res.get(), PG_DIAG_SQLSTATE) : nullptr;
        std::string msg = "postgres: " + std::string(PQerrorMessage(conn_)) + " [" + stmt.substr(0, 120) + "]";
        const bool lost = PQstatus(conn_) != CONNECTION_OK;
        if (lost || !state || transient_sqlstate(state)) {
            if (lost) in_tx_ = false;
            throw ConnectionError(msg);
        }
        throw StorageError(msg);
    }

    static SqlValue decode(PGresult* res, int r, int c) {
        if (PQgetisnull(res, r, c)) return std::monostate{};
        const char* s = PQgetvalue(res, r, c);
        switch (PQftype(res, c)) {
            case kInt2Oid:
            case kInt4Oid:
            case kInt8Oid: return std::int64_t{std::stoll(s)};
            case kBoolOid: return std::int64_t{s[0] == 't' ? 1 : 0};
            case kFloat4Oid:
            case kFloat8Oid:
            case kNumericOid: return parse_float(s);
            case kByteaOid: {
                std::size_t n = 0;
                unsigned char* raw = PQunescapeBytea(reinterpret_cast<const unsigned char*>(s), &n);
                if (!raw) throw StorageError("postgres: cannot decode bytea");
                Bytes out(raw, raw + n);
                PQfreemem(raw);
                return out;
            }
            default: return std::string(s, static_cast<std::size_t>(PQgetlength(res, r, c)));
        }
    }

    std::string conninfo_;
    PGconn* conn_ = nullptr;
    bool in_tx_ = false;
};

}  // namespace

std::unique_ptr<SqlConnection> open_postgres(const std::string& conninfo) {
    return std::make_unique<PostgresConnection>(conninfo);
}

}  // namespace simstudy

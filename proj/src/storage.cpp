#include "simstudy/storage.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace simstudy {

namespace {

const char* column_type(Backend b, FieldKind kind) {
    const bool pg = b == Backend::postgres;
    switch (kind) {
        case FieldKind::text: return "TEXT";
        case FieldKind::real: return pg ? "DOUBLE PRECISION" : "REAL";
        case FieldKind::integer: return pg ? "BIGINT" : "INTEGER";
        case FieldKind::blob: return pg ? "BYTEA" : "BLOB";
    }
    return "TEXT";
}

// Declared type as reported back by the engine's catalog.
std::string reported_type(Backend b, std::string_view declared) {
    if (b == Backend::sqlite) {
        std::string t(declared);
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return t;
    }
    if (declared == "TEXT") return "text";
    if (declared == "DOUBLE PRECISION") return "double precision";
    if (declared == "BIGINT") return "bigint";
    if (declared == "BYTEA") return "bytea";
    if (declared == "TIMESTAMP") return "timestamp without time zone";
    return std::string(declared);
}

struct ColumnDecl {
    std::string name;
    std::string type;
};

std::vector<ColumnDecl> expected_columns(Backend b, const ResultSchema& schema) {
    const bool pg = b == Backend::postgres;
    std::vector<ColumnDecl> cols;
    cols.push_back({"id", pg ? "BIGINT" : "INTEGER"});
    for (const auto& f : schema.fields()) cols.push_back({f.name, column_type(b, f.kind)});
    cols.push_back({"seed", pg ? "BIGINT" : "INTEGER"});
    cols.push_back({"worker_id", "TEXT"});
    cols.push_back({"elapsed_time", pg ? "DOUBLE PRECISION" : "REAL"});
    cols.push_back({"created_at", pg ? "TIMESTAMP" : "TEXT"});
    return cols;
}

SqlValue to_sql(const Value& v) {
    switch (v.kind()) {
        case ValueKind::text: return v.as_text();
        case ValueKind::floating: return v.as_float();
        case ValueKind::integer: return v.as_integer();
        case ValueKind::boolean: return std::int64_t{v.as_bool() ? 1 : 0};
    }
    return std::monostate{};
}

SqlValue to_sql(const Outcome& o) {
    return std::visit(
        [](const auto& v) -> SqlValue {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Datum>) return serialize_blob(v);
            else return v;
        },
        o);
}

// Group-by identity of a config tuple, exact on stored values.
void append_key(std::string& key, const SqlValue& v) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) key += "n;";
            else if constexpr (std::is_same_v<T, std::int64_t>) key += "i" + std::to_string(x) + ";";
            else if constexpr (std::is_same_v<T, double>) key += "f" + std::to_string(std::bit_cast<std::uint64_t>(x)) + ";";
            else if constexpr (std::is_same_v<T, std::string>) key += "t" + std::to_string(x.size()) + ":" + x + ";";
            else key += "b" + std::to_string(x.size()) + ";";
        },
        v);
}

Value config_value(const FieldSpec& f, const SqlValue& v) {
    switch (f.kind) {
        case FieldKind::text:
            if (auto s = std::get_if<std::string>(&v)) return Value(*s);
            break;
        case FieldKind::real:
            if (auto d = std::get_if<double>(&v)) return Value(*d);
            if (auto i = std::get_if<std::int64_t>(&v)) return Value(static_cast<double>(*i));
            break;
        case FieldKind::integer:
            if (auto i = std::get_if<std::int64_t>(&v)) return Value(*i);
            break;
        case FieldKind::blob: break;
    }
    throw StorageError("column '" + f.name + "' holds a value of unexpected type");
}

Outcome outcome_value(const FieldSpec& f, const SqlValue& v) {
    switch (f.kind) {
        case FieldKind::text:
            if (auto s = std::get_if<std::string>(&v)) return *s;
            break;
        case FieldKind::real:
            if (auto d = std::get_if<double>(&v)) return *d;
            if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
            break;
        case FieldKind::integer:
            if (auto i = std::get_if<std::int64_t>(&v)) return *i;
            break;
        case FieldKind::blob:
            if (auto b = std::get_if<Bytes>(&v)) return deserialize_blob(*b);
            break;
    }
    throw StorageError("column '" + f.name + "' holds a value of unexpected type");
}

std::int64_t as_int(const SqlValue& v) {
    if (auto i = std::get_if<std::int64_t>(&v)) return *i;
    if (auto d = std::get_if<double>(&v)) return static_cast<std::int64_t>(*d);
    throw StorageError("expected an integer column");
}

std::int64_t micros(Timestamp t) { return t.time_since_epoch().count(); }

/// Builds "a = ?1 AND b = ?2" and the matching parameter list.
struct Where {
    std::string sql;
    std::vector<SqlValue> params;
};

Where where_config(const SqlConnection& conn, const ResultSchema& schema, const Configuration& selection,
                   int first_param = 1) {
    Where w;
    int idx = first_param;
    for (const auto& [name, value] : selection.assignments()) {
        const FieldSpec* f = schema.find(name);
        if (!f || f->role != FieldRole::config)
            throw SchemaError("'" + name + "' is not a config field of " + schema.table_name());
        if (!w.sql.empty()) w.sql += " AND ";
        w.sql += quote_ident(name) + " = " + conn.placeholder(idx++);
        w.params.push_back(to_sql(value));
    }
    return w;
}

std::string join_idents(const std::vector<FieldSpec>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ", ";
        out += quote_ident(fields[i].name);
    }
    return out;
}

void check_config(const ResultSchema& schema, const Configuration& config) {
    const auto fields = schema.config_fields();
    if (config.size() != fields.size())
        throw SchemaError("configuration does not cover the config fields of " + schema.table_name());
    for (const auto& f : fields)
        if (field_kind_for(config.at(f.name).kind()) != f.kind)
            throw SchemaError("configuration value for '" + f.name + "' has the wrong type");
}

std::int64_t insert_row(SqlConnection& conn, const ResultSchema& schema, const ResultRecord& record) {
    std::string cols, marks;
    std::vector<SqlValue> params;
    int idx = 1;
    auto add = [&](const std::string& name, SqlValue v) {
        if (!cols.empty()) {
            cols += ", ";
            marks += ", ";
        }
        cols += quote_ident(name);
        marks += conn.placeholder(idx++);
        params.push_back(std::move(v));
    };
    for (const auto& f : schema.fields()) {
        if (f.role == FieldRole::config) add(f.name, to_sql(record.config.at(f.name)));
        else add(f.name, to_sql(record.outcomes.find(f.name)->second));
    }
    add("seed", std::bit_cast<std::int64_t>(record.meta.seed));
    add("worker_id", record.meta.worker_id);
    add("elapsed_time", record.meta.elapsed_time);
    add("created_at", format_timestamp(record.meta.created_at));
    const std::string sql = "INSERT INTO " + quote_ident(schema.table_name()) + " (" + cols + ") VALUES (" + marks +
                            ") ON CONFLICT (worker_id, seed) DO NOTHING";
    return conn.execute(sql, params);
}

}  // namespace

std::string reservation_table(const ResultSchema& schema) { return schema.table_name() + "__reservations"; }

ResultStore::ResultStore(ConnectionFactory factory, Backend backend, RetryPolicy policy, Sleeper sleep)
    : factory_(std::move(factory)), backend_(backend), policy_(policy), sleep_(std::move(sleep)) {
    policy_.validate();
}

ResultStore ResultStore::open(std::string_view dsn_text, RetryPolicy policy, Sleeper sleep) {
    const Dsn dsn = Dsn::parse(dsn_text);
    return ResultStore([dsn] { return open_connection(dsn); }, dsn.backend, policy, std::move(sleep));
}

SqlConnection& ResultStore::connection() {
    if (!conn_) conn_ = factory_();
    return *conn_;
}

void ResultStore::init_table(const ResultSchema& schema) {
    with_retry([&](SqlConnection& conn) {
        const auto expected = expected_columns(backend_, schema);
        const std::string table = schema.table_name();
        Transaction tx(conn, Transaction::Mode::write, "simstudy-ddl");
        const auto existing = conn.table_columns(table);
        if (!existing.empty()) {
            std::map<std::string, std::string> have;
            for (const auto& c : existing) have[c.name] = c.type;
            std::ostringstream problems;
            for (const auto& c : expected) {
                auto it = have.find(c.name);
                if (it == have.end()) problems << " missing column '" << c.name << "';";
                else if (it->second != reported_type(backend_, c.type))
                    problems << " column '" << c.name << "' is " << it->second << ", expected "
                             << reported_type(backend_, c.type) << ";";
            }
            for (const auto& c : existing)
                if (std::none_of(expected.begin(), expected.end(), [&](const ColumnDecl& e) { return e.name == c.name; }))
                    problems << " unexpected column '" << c.name << "';";
            if (!problems.str().empty())
                throw SchemaMismatchError("table " + table + " does not match its schema:" + problems.str());
        } else {
            std::string ddl = "CREATE TABLE " + quote_ident(table) + " (";
            ddl += backend_ == Backend::postgres ? "\"id\" BIGSERIAL PRIMARY KEY"
                                                 : "\"id\" INTEGER PRIMARY KEY AUTOINCREMENT";
            for (std::size_t i = 1; i < expected.size(); ++i)
                ddl += ", " + quote_ident(expected[i].name) + " " + expected[i].type + " NOT NULL";
            ddl += ", UNIQUE (\"worker_id\", \"seed\"))";
            conn.execute(ddl);
            const auto configs = schema.config_fields();
            if (!configs.empty())
                conn.execute("CREATE INDEX " + quote_ident(table + "__config") + " ON " + quote_ident(table) + " (" +
                             join_idents(configs) + ")");
        }

        const std::string res = reservation_table(schema);
        if (conn.table_columns(res).empty()) {
            std::string ddl = "CREATE TABLE " + quote_ident(res) + " (";
            ddl += backend_ == Backend::postgres ? "\"id\" BIGSERIAL PRIMARY KEY"
                                                 : "\"id\" INTEGER PRIMARY KEY AUTOINCREMENT";
            for (const auto& f : schema.config_fields())
                ddl += ", " + quote_ident(f.name) + " " + column_type(backend_, f.kind) + " NOT NULL";
            ddl += std::string(", \"holder\" TEXT NOT NULL, \"lease_expiry\" ") +
                   (backend_ == Backend::postgres ? "BIGINT" : "INTEGER") + " NOT NULL)";
            conn.execute(ddl);
        }
        tx.commit();
    });
}

bool ResultStore::table_exists(const ResultSchema& schema) {
    return with_retry([&](SqlConnection& conn) { return !conn.table_columns(schema.table_name()).empty(); });
}

std::int64_t ResultStore::count_results(const ResultSchema& schema, const Configuration& config) {
    check_config(schema, config);
    return with_retry([&](SqlConnection& conn) {
        const Where w = where_config(conn, schema, config);
        const auto rows = conn.query(
            "SELECT COUNT(*) FROM " + quote_ident(schema.table_name()) + " WHERE " + w.sql, w.params);
        return as_int(rows.at(0).at(0));
    });
}

std::vector<std::int64_t> ResultStore::count_many(const ResultSchema& schema, std::span<const Configuration> configs,
                                                  std::optional<Timestamp> live_at) {
    const auto fields = schema.config_fields();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        check_config(schema, configs[i]);
        std::string key;
        for (const auto& f : fields) append_key(key, to_sql(configs[i].at(f.name)));
        index.emplace(std::move(key), i);
    }
    return with_retry([&](SqlConnection& conn) {
        std::vector<std::int64_t> counts(configs.size(), 0);
        auto tally = [&](const std::vector<SqlRow>& rows) {
            for (const auto& row : rows) {
                std::string key;
                for (std::size_t c = 0; c < fields.size(); ++c) append_key(key, row[c]);
                if (auto it = index.find(key); it != index.end()) counts[it->second] += as_int(row.back());
            }
        };
        const std::string cols = join_idents(fields);
        Transaction tx(conn, Transaction::Mode::read);
        tally(conn.query("SELECT " + cols + ", COUNT(*) FROM " + quote_ident(schema.table_name()) + " GROUP BY " +
                         cols));
        if (live_at) {
            const SqlValue now{micros(*live_at)};
            tally(conn.query("SELECT " + cols + ", COUNT(*) FROM " + quote_ident(reservation_table(schema)) +
                                 " WHERE \"lease_expiry\" > " + conn.placeholder(1) + " GROUP BY " + cols,
                             std::span(&now, 1)));
        }
        tx.commit();
        return counts;
    });
}

bool ResultStore::insert_result(const ResultSchema& schema, const ResultRecord& record) {
    validate_record(schema, record);
    try {
        return with_retry([&](SqlConnection& conn) {
            Transaction tx(conn, Transaction::Mode::write);
            const bool inserted = insert_row(conn, schema, record) == 1;
            tx.commit();
            return inserted;
        });
    } catch (const RetryExhaustedError& e) {
        throw PendingRecordError(e, record);
    }
}

std::vector<ResultRecord> ResultStore::read_results(const ResultSchema& schema, const Configuration& selection) {
    const auto configs = schema.config_fields();
    const auto outcomes = schema.outcome_fields();
    return with_retry([&](SqlConnection& conn) {
        const Where w = where_config(conn, schema, selection);
        std::string sql = "SELECT " + join_idents(configs) + ", " + join_idents(outcomes) +
                          ", \"seed\", \"worker_id\", \"elapsed_time\", \"created_at\" FROM " +
                          quote_ident(schema.table_name());
        if (!w.sql.empty()) sql += " WHERE " + w.sql;
        sql += " ORDER BY \"id\"";
        std::vector<ResultRecord> out;
        for (const auto& row : conn.query(sql, w.params)) {
            ResultRecord rec;
            std::size_t c = 0;
            std::vector<Configuration::Assignment> items;
            for (const auto& f : configs) items.emplace_back(f.name, config_value(f, row[c++]));
            rec.config = Configuration(std::move(items));
            for (const auto& f : outcomes) rec.outcomes.emplace(f.name, outcome_value(f, row[c++]));
            rec.meta.seed = std::bit_cast<std::uint64_t>(as_int(row[c++]));
            rec.meta.worker_id = std::get<std::string>(row[c++]);
            const SqlValue& el = row[c++];
            rec.meta.elapsed_time = std::holds_alternative<double>(el) ? std::get<double>(el)
                                                                       : static_cast<double>(as_int(el));
            rec.meta.created_at = parse_timestamp(std::get<std::string>(row[c++]));
            out.push_back(std::move(rec));
        }
        return out;
    });
}

std::optional<Reservation> ResultStore::reserve(const ResultSchema& schema, const Configuration& config,
                                                std::int64_t max_count, const std::string& holder, Seconds lease,
                                                Timestamp now) {
    check_config(schema, config);
    const auto fields = schema.config_fields();
    const Timestamp expiry = now + std::chrono::duration_cast<std::chrono::microseconds>(lease);
    if (expiry <= now) throw Error("reservation lease must be positive");
    return with_retry([&](SqlConnection& conn) -> std::optional<Reservation> {
        const std::string res = reservation_table(schema);
        Transaction tx(conn, Transaction::Mode::write, schema.table_name());

        const Where w = where_config(conn, schema, config);
        const std::string lease_param = conn.placeholder(static_cast<int>(w.params.size()) + 1);
        std::vector<SqlValue> params = w.params;
        params.emplace_back(micros(now));
        conn.execute("DELETE FROM " + quote_ident(res) + " WHERE " + w.sql + " AND \"lease_expiry\" <= " + lease_param,
                     params);
        const auto done = as_int(conn.query("SELECT COUNT(*) FROM " + quote_ident(schema.table_name()) + " WHERE " +
                                                w.sql,
                                            w.params)
                                     .at(0)
                                     .at(0));
        const auto live = as_int(
            conn.query("SELECT COUNT(*) FROM " + quote_ident(res) + " WHERE " + w.sql, w.params).at(0).at(0));
        if (done + live >= max_count) {
            tx.commit();
            return std::nullopt;
        }

        std::string cols = join_idents(fields) + ", \"holder\", \"lease_expiry\"";
        std::string marks;
        std::vector<SqlValue> ins;
        int idx = 1;
        for (const auto& f : fields) {
            marks += conn.placeholder(idx++) + ", ";
            ins.push_back(to_sql(config.at(f.name)));
        }
        marks += conn.placeholder(idx) + ", " + conn.placeholder(idx + 1);
        ins.emplace_back(holder);
        ins.emplace_back(micros(expiry));
        const auto rows = conn.query("INSERT INTO " + quote_ident(res) + " (" + cols + ") VALUES (" + marks +
                                         ") RETURNING \"id\"",
                                     ins);
        tx.commit();
        return Reservation{as_int(rows.at(0).at(0)), config, holder, expiry};
    });
}

void ResultStore::release(const ResultSchema& schema, const Reservation& reservation) {
    with_retry([&](SqlConnection& conn) {
        const SqlValue id{reservation.id};
        conn.execute("DELETE FROM " + quote_ident(reservation_table(schema)) + " WHERE \"id\" = " + conn.placeholder(1),
                     std::span(&id, 1));
    });
}

bool ResultStore::complete(const ResultSchema& schema, const Reservation& reservation, const ResultRecord& record) {
    validate_record(schema, record);
    try {
        return with_retry([&](SqlConnection& conn) {
            // same lock as reserve(), so its two counts see the swap atomically
            Transaction tx(conn, Transaction::Mode::write, schema.table_name());
            const bool inserted = insert_row(conn, schema, record) == 1;
            const SqlValue id{reservation.id};
            conn.execute("DELETE FROM " + quote_ident(reservation_table(schema)) + " WHERE \"id\" = " +
                             conn.placeholder(1),
                         std::span(&id, 1));
            tx.commit();
            return inserted;
        });
    } catch (const RetryExhaustedError& e) {
        throw PendingRecordError(e, record);
    }
}

std::int64_t ResultStore::count_reservations(const ResultSchema& schema, Timestamp now) {
    return with_retry([&](SqlConnection& conn) {
        const SqlValue t{micros(now)};
        return as_int(conn.query("SELECT COUNT(*) FROM " + quote_ident(reservation_table(schema)) +
                                     " WHERE \"lease_expiry\" > " + conn.placeholder(1),
                                 std::span(&t, 1))
                          .at(0)
                          .at(0));
    });
}

std::int64_t ResultStore::purge(const ResultSchema& schema) {
    return with_retry([&](SqlConnection& conn) -> std::int64_t {
        if (conn.table_columns(schema.table_name()).empty()) return 0;
        Transaction tx(conn, Transaction::Mode::write, schema.table_name());
        const auto n = conn.execute("DELETE FROM " + quote_ident(schema.table_name()));
        if (!conn.table_columns(reservation_table(schema)).empty())
            conn.execute("DELETE FROM " + quote_ident(reservation_table(schema)));
        tx.commit();
        return n;
    });
}

void RetryPolicy::validate() const {
    if (!(base_backoff.count() > 0)) throw Error("retry base_backoff must be > 0");
    if (max_backoff < base_backoff) throw Error("retry max_backoff must be >= base_backoff");
    if (max_wait.count() < 0) throw Error("retry max_wait must be >= 0");
}

}  // namespace simstudy

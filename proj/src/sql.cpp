#include "simstudy/sql.hpp"

#include "simstudy/errors.hpp"

namespace simstudy {

const char* to_string(Backend b) {
    switch (b) {
        case Backend::sqlite: return "sqlite";
        case Backend::postgres: return "postgres";
    }
    return "?";
}

Dsn Dsn::parse(std::string_view text) {
    auto strip = [&](std::string_view prefix) {
        if (text.substr(0, prefix.size()) != prefix) return false;
        text.remove_prefix(prefix.size());
        return true;
    };
    if (text.empty()) throw DsnError("empty connection descriptor");
    if (text.starts_with("postgresql://") || text.starts_with("postgres://"))
        return {Backend::postgres, std::string(text)};
    if (strip("pg:")) {
        if (text.empty()) throw DsnError("empty PostgreSQL conninfo");
        return {Backend::postgres, std::string(text)};
    }
    if (strip("sqlite://") || strip("sqlite:")) {
        if (text.empty()) throw DsnError("empty sqlite path");
        return {Backend::sqlite, std::string(text)};
    }
    if (const auto colon = text.find("://"); colon != std::string_view::npos)
        throw DsnError("unsupported backend '" + std::string(text.substr(0, colon)) + "'");
    return {Backend::sqlite, std::string(text)};
}

std::unique_ptr<SqlConnection> open_connection(const Dsn& dsn) {
    switch (dsn.backend) {
        case Backend::sqlite: return open_sqlite(dsn.target);
        case Backend::postgres:
#ifdef SIMSTUDY_HAVE_POSTGRES
            return open_postgres(dsn.target);
#else
            throw DsnError("this build has no PostgreSQL support");
#endif
    }
    throw DsnError("unknown backend");
}

Transaction::Transaction(SqlConnection& conn, Mode mode, std::string_view lock_key) : conn_(conn) {
    if (mode == Mode::write) conn_.begin_write(lock_key);
    else conn_.begin_read();
}

Transaction::~Transaction() {
    if (!done_) conn_.rollback();
}

void Transaction::commit() {
    conn_.commit();
    done_ = true;
}

std::string quote_ident(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace simstudy

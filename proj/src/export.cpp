#include "simstudy/export.hpp"

#include <fstream>

#include "json.hpp"

#include "simstudy/errors.hpp"

namespace simstudy {

namespace {

std::vector<Cell> group_cells(const Configuration& group, const std::vector<std::string>& axes) {
    std::vector<Cell> cells;
    for (const auto& a : axes) cells.push_back(to_cell(group.at(a)));
    return cells;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

}  // namespace

ExportFormat parse_export_format(std::string_view name) {
    if (name == "csv") return ExportFormat::csv;
    if (name == "json") return ExportFormat::json;
    throw Error("unknown export format '" + std::string(name) + "' (expected csv or json)");
}

Cell to_cell(const Value& v) {
    switch (v.kind()) {
        case ValueKind::text: return v.as_text();
        case ValueKind::floating: return v.as_float();
        case ValueKind::integer: return v.as_integer();
        case ValueKind::boolean: return std::int64_t{v.as_bool() ? 1 : 0};
    }
    return std::monostate{};
}

std::string cell_text(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
    } visit;
    return std::visit(visit, c);
}

Table summary_table(const std::vector<AggregateSummary>& summaries, const std::vector<std::string>& group_axes,
                    const std::vector<std::string>& outcomes, bool with_mean_se) {
    Table t;
    t.columns = group_axes;
    t.columns.push_back("n");
    for (const auto& o : outcomes) {
        t.columns.push_back(o + "_mean");
        t.columns.push_back(o + "_se");
        if (with_mean_se) t.columns.push_back(o);
    }
    for (const auto& s : summaries) {
        auto row = group_cells(s.group, group_axes);
        row.emplace_back(s.n);
        for (const auto& o : outcomes) {
            auto it = s.outcomes.find(o);
            if (it == s.outcomes.end()) {
                row.insert(row.end(), with_mean_se ? 3 : 2, std::monostate{});
                continue;
            }
            row.emplace_back(it->second.mean);
            row.emplace_back(it->second.std_error);
            if (with_mean_se) row.emplace_back(format_mean_se(it->second));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table rejection_table_export(const std::vector<RejectionRateRow>& rows, const std::vector<std::string>& group_axes) {
    Table t;
    t.columns = group_axes;
    for (const char* c : {"avg_p", "se_p", "err_1pct", "se_1", "err_5pct", "se_5"}) t.columns.emplace_back(c);
    for (const auto& r : rows) {
        auto row = group_cells(r.group, group_axes);
        row.emplace_back(r.avg_p.mean);
        row.emplace_back(r.avg_p.std_error);
        row.emplace_back(r.rate_1pct.rate);
        row.emplace_back(r.rate_1pct.std_error);
        row.emplace_back(r.rate_5pct.rate);
        row.emplace_back(r.rate_5pct.std_error);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table ecdf_table(const std::vector<LabeledCurve>& curves, const std::vector<std::string>& group_axes) {
    Table t;
    t.columns = group_axes;
    for (const char* c : {"x", "ecdf", "band", "lower", "upper"}) t.columns.emplace_back(c);
    for (const auto& [group, curve] : curves) {
        const auto prefix = group_cells(group, group_axes);
        for (const auto& p : curve.points()) {
            auto row = prefix;
            row.emplace_back(p.x);
            row.emplace_back(p.f);
            row.emplace_back(curve.band_halfwidth(p.x));
            row.emplace_back(curve.lower(p.x));
            row.emplace_back(curve.upper(p.x));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

void write_csv(const Table& table, std::ostream& out) {
    auto line = [&](const auto& fields, auto text) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << csv_field(text(fields[i]));
        }
        out << "\r\n";
    };
    line(table.columns, [](const std::string& s) { return s; });
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw Error("table row width does not match its header");
        line(row, [](const Cell& c) { return cell_text(c); });
    }
}

void write_json(const Table& table, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw Error("table row width does not match its header");
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            auto& slot = obj[table.columns[i]];
            std::visit(
                [&](const auto& v) {
                    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) slot = nullptr;
                    else slot = v;
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
}

void write_table(const Table& table, ExportFormat format, std::ostream& out) {
    if (format == ExportFormat::csv) write_csv(table, out);
    else write_json(table, out);
}

void export_table(const Table& table, ExportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_table(table, format, out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace simstudy

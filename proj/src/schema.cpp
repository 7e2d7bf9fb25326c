#include "simstudy/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>

#include "simstudy/errors.hpp"

namespace simstudy {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || s.size() > 63) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_meta(std::string_view name) {
    return std::any_of(std::begin(kMetaColumns), std::end(kMetaColumns),
                       [&](const char* m) { return name == m; });
}

bool outcome_matches(const Outcome& v, FieldKind kind) {
    switch (kind) {
        case FieldKind::real: return std::holds_alternative<double>(v);
        case FieldKind::integer: return std::holds_alternative<std::int64_t>(v);
        case FieldKind::text: return std::holds_alternative<std::string>(v);
        case FieldKind::blob: return std::holds_alternative<Datum>(v);
    }
    return false;
}

}  // namespace

const char* to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::text: return "text";
        case FieldKind::real: return "real";
        case FieldKind::integer: return "integer";
        case FieldKind::blob: return "blob";
    }
    return "?";
}

FieldKind field_kind_for(ValueKind kind) {
    switch (kind) {
        case ValueKind::text: return FieldKind::text;
        case ValueKind::floating: return FieldKind::real;
        case ValueKind::integer:
        case ValueKind::boolean: return FieldKind::integer;
    }
    return FieldKind::text;
}

ResultSchema::ResultSchema(std::string table_name, std::vector<FieldSpec> fields)
    : table_(std::move(table_name)), fields_(std::move(fields)) {
    if (!is_identifier(table_)) throw SchemaError("invalid table name '" + table_ + "'");
    std::set<std::string, std::less<>> names;
    bool has_outcome = false;
    for (const auto& f : fields_) {
        if (!is_identifier(f.name)) throw SchemaError("invalid field name '" + f.name + "'");
        if (is_meta(f.name)) throw SchemaError("field name '" + f.name + "' is reserved");
        if (!names.insert(f.name).second) throw SchemaError("duplicate field '" + f.name + "'");
        if (f.role == FieldRole::config && f.kind == FieldKind::blob)
            throw SchemaError("config field '" + f.name + "' cannot be a blob");
        has_outcome |= f.role == FieldRole::outcome;
    }
    if (!has_outcome) throw SchemaError("schema needs at least one outcome field");
}

ResultSchema ResultSchema::for_space(std::string table_name, const ParamSpace& space,
                                     std::vector<FieldSpec> outcomes) {
    std::vector<FieldSpec> fields;
    for (const auto& axis : space.axes())
        fields.push_back({axis.name, field_kind_for(axis.values.front().kind()), FieldRole::config});
    for (auto& o : outcomes) {
        o.role = FieldRole::outcome;
        fields.push_back(std::move(o));
    }
    return ResultSchema(std::move(table_name), std::move(fields));
}

std::vector<FieldSpec> ResultSchema::config_fields() const {
    std::vector<FieldSpec> out;
    std::copy_if(fields_.begin(), fields_.end(), std::back_inserter(out),
                 [](const FieldSpec& f) { return f.role == FieldRole::config; });
    return out;
}

std::vector<FieldSpec> ResultSchema::outcome_fields() const {
    std::vector<FieldSpec> out;
    std::copy_if(fields_.begin(), fields_.end(), std::back_inserter(out),
                 [](const FieldSpec& f) { return f.role == FieldRole::outcome; });
    return out;
}

const FieldSpec* ResultSchema::find(std::string_view name) const noexcept {
    auto it = std::find_if(fields_.begin(), fields_.end(), [&](const FieldSpec& f) { return f.name == name; });
    return it == fields_.end() ? nullptr : &*it;
}

void ResultSchema::check_covers(const ParamSpace& space) const {
    for (const auto& axis : space.axes()) {
        const FieldSpec* f = find(axis.name);
        if (!f || f->role != FieldRole::config)
            throw SchemaError("axis '" + axis.name + "' has no config field in table " + table_);
        const FieldKind expected = field_kind_for(axis.values.front().kind());
        if (f->kind != expected)
            throw SchemaError("field '" + axis.name + "' is " + to_string(f->kind) + ", axis needs " +
                              to_string(expected));
    }
    for (const auto& f : config_fields())
        if (!space.find(f.name)) throw SchemaError("config field '" + f.name + "' is not an axis of the space");
}

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::microseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const auto us = (t - day).count();
    const long long secs = us / 1'000'000;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02lld:%02lld:%02lld.%06lld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), secs / 3600,
                  (secs / 60) % 60, secs % 60, static_cast<long long>(us % 1'000'000));
    return buf;
}

Timestamp parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    auto fail = [&]() -> Timestamp { throw StorageError("bad timestamp '" + std::string(s) + "'"); };
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        if (pos + len > s.size()) fail();
        auto r = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (r.ec != std::errc{} || r.ptr != s.data() + pos + len) fail();
        return v;
    };
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != ' ' && s[10] != 'T') || s[13] != ':' ||
        s[16] != ':')
        return fail();
    const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                             day{static_cast<unsigned>(num(8, 2))}};
    if (!ymd.ok()) return fail();
    long long us = (num(11, 2) * 3600LL + num(14, 2) * 60LL + num(17, 2)) * 1'000'000LL;
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        long long frac = 0;
        int digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (digits < 6) {
                frac = frac * 10 + (s[pos] - '0');
                ++digits;
            }
            ++pos;
        }
        while (digits++ < 6) frac *= 10;
        us += frac;
    }
    const std::string_view rest = s.substr(pos);
    if (!(rest.empty() || rest == "Z" || rest == "+00" || rest == "+00:00")) return fail();
    return Timestamp{sys_days{ymd}} + microseconds{us};
}

void validate_record(const ResultSchema& schema, const ResultRecord& record) {
    const auto configs = schema.config_fields();
    if (record.config.size() != configs.size())
        throw SchemaError("record config has " + std::to_string(record.config.size()) + " assignments, table " +
                          schema.table_name() + " has " + std::to_string(configs.size()) + " config fields");
    for (const auto& f : configs) {
        const Value* v = record.config.find(f.name);
        if (!v) throw SchemaError("record config lacks '" + f.name + "'");
        if (field_kind_for(v->kind()) != f.kind)
            throw SchemaError("config '" + f.name + "' is " + to_string(v->kind()) + ", field is " +
                              to_string(f.kind));
    }
    const auto outcomes = schema.outcome_fields();
    if (record.outcomes.size() != outcomes.size())
        throw SchemaError("record has " + std::to_string(record.outcomes.size()) + " outcomes, table " +
                          schema.table_name() + " expects " + std::to_string(outcomes.size()));
    for (const auto& f : outcomes) {
        auto it = record.outcomes.find(f.name);
        if (it == record.outcomes.end()) throw SchemaError("record lacks outcome '" + f.name + "'");
        if (!outcome_matches(it->second, f.kind))
            throw SchemaError("outcome '" + f.name + "' does not match field kind " +
                              std::string(to_string(f.kind)));
    }
}

}  // namespace simstudy

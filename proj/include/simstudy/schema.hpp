#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "simstudy/datum.hpp"
#include "simstudy/paramspace.hpp"

namespace simstudy {

enum class FieldKind { text, real, integer, blob };
enum class FieldRole { config, outcome };

const char* to_string(FieldKind kind);

/// Column kind a parameter value of `kind` is stored as (booleans as integer 0/1).
FieldKind field_kind_for(ValueKind kind);

struct FieldSpec {
    std::string name;
    FieldKind kind;
    FieldRole role;
};

/// Names reserved for the bookkeeping columns every result table carries.
inline constexpr const char* kMetaColumns[] = {"id", "seed", "worker_id", "elapsed_time", "created_at"};

/// Typed declaration of a result table: the config columns that identify a
/// replication's configuration, and the outcome columns it produced.
class ResultSchema {
public:
    ResultSchema(std::string table_name, std::vector<FieldSpec> fields);

    /// Config fields derived from the space's axes, followed by `outcomes`.
    static ResultSchema for_space(std::string table_name, const ParamSpace& space,
                                  std::vector<FieldSpec> outcomes);

    const std::string& table_name() const noexcept { return table_; }
    const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
    std::vector<FieldSpec> config_fields() const;
    std::vector<FieldSpec> outcome_fields() const;
    const FieldSpec* find(std::string_view name) const noexcept;

    /// Throws SchemaError unless every axis is a config field of matching kind
    /// and every config field is an axis.
    void check_covers(const ParamSpace& space) const;

private:
    std::string table_;
    std::vector<FieldSpec> fields_;
};

/// Scalar outcomes map to real/integer/text columns; Datum goes to blob columns.
using Outcome = std::variant<double, std::int64_t, std::string, Datum>;
using OutcomeMap = std::map<std::string, Outcome, std::less<>>;

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::microseconds>;

Timestamp now_utc();
/// "YYYY-MM-DD HH:MM:SS.ffffff" (UTC, no zone suffix).
std::string format_timestamp(Timestamp t);
/// Accepts the format above with ' ' or 'T', optional fraction, optional 'Z' / "+00".
Timestamp parse_timestamp(std::string_view s);

struct RecordMeta {
    std::uint64_t seed = 0;
    double elapsed_time = 0.0;
    std::string worker_id;
    Timestamp created_at{};

    bool operator==(const RecordMeta&) const = default;
};

/// One completed replication.
struct ResultRecord {
    Configuration config;
    OutcomeMap outcomes;
    RecordMeta meta;

    bool operator==(const ResultRecord&) const = default;
};

/// Throws SchemaError unless config and outcomes exactly cover the schema's
/// fields with matching kinds.
void validate_record(const ResultSchema& schema, const ResultRecord& record);

}  // namespace simstudy

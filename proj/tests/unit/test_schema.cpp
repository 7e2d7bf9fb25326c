#include "doctest.h"
#include "simstudy/errors.hpp"
#include "simstudy/schema.hpp"

using namespace simstudy;

TEST_SUITE("schema") {
    TEST_CASE("schema derived from a space covers it") {
        const ParamSpace space{{"method", {"ols"}}, {"n", {100}}, {"flag", {true, false}}};
        const auto schema = ResultSchema::for_space("t", space, {{"score", FieldKind::real, FieldRole::outcome}});
        CHECK_NOTHROW(schema.check_covers(space));
        CHECK(schema.config_fields().size() == 3);
        CHECK(schema.find("flag")->kind == FieldKind::integer);
        CHECK(schema.find("n")->kind == FieldKind::integer);
        CHECK(schema.outcome_fields().size() == 1);
    }

    TEST_CASE("invalid declarations are rejected") {
        const FieldSpec out{"score", FieldKind::real, FieldRole::outcome};
        CHECK_THROWS_AS(ResultSchema("bad name", {out}), SchemaError);
        CHECK_THROWS_AS(ResultSchema("t", {{"method", FieldKind::text, FieldRole::config}}), SchemaError);
        CHECK_THROWS_AS(ResultSchema("t", {out, out}), SchemaError);
        CHECK_THROWS_AS(ResultSchema("t", {out, {"seed", FieldKind::integer, FieldRole::outcome}}), SchemaError);
        CHECK_THROWS_AS(ResultSchema("t", {out, {"elapsed_time", FieldKind::real, FieldRole::outcome}}), SchemaError);
        CHECK_THROWS_AS(ResultSchema("t", {out, {"cfg", FieldKind::blob, FieldRole::config}}), SchemaError);
    }

    TEST_CASE("coverage mismatches are reported") {
        const ParamSpace space{{"method", {"ols"}}, {"n", {100}}};
        const ResultSchema missing("t", {{"method", FieldKind::text, FieldRole::config},
                                         {"score", FieldKind::real, FieldRole::outcome}});
        CHECK_THROWS_AS(missing.check_covers(space), SchemaError);
        const ResultSchema wrong_kind("t", {{"method", FieldKind::text, FieldRole::config},
                                            {"n", FieldKind::real, FieldRole::config},
                                            {"score", FieldKind::real, FieldRole::outcome}});
        CHECK_THROWS_AS(wrong_kind.check_covers(space), SchemaError);
    }

    TEST_CASE("records are validated against the schema") {
        const ResultSchema schema("t", {{"method", FieldKind::text, FieldRole::config},
                                        {"score", FieldKind::real, FieldRole::outcome},
                                        {"coef", FieldKind::blob, FieldRole::outcome}});
        ResultRecord rec;
        rec.config = Configuration{{"method", "ols"}};
        rec.outcomes = {{"score", 0.5}, {"coef", Datum::list({1.0, 2.0})}};
        CHECK_NOTHROW(validate_record(schema, rec));

        auto bad = rec;
        bad.outcomes["score"] = std::int64_t{1};
        CHECK_THROWS_AS(validate_record(schema, bad), SchemaError);
        bad = rec;
        bad.outcomes.erase("coef");
        CHECK_THROWS_AS(validate_record(schema, bad), SchemaError);
        bad = rec;
        bad.outcomes["extra"] = 1.0;
        CHECK_THROWS_AS(validate_record(schema, bad), SchemaError);
        bad = rec;
        bad.config = Configuration{{"method", 3}};
        CHECK_THROWS_AS(validate_record(schema, bad), SchemaError);
    }

    TEST_CASE("timestamps round-trip at microsecond resolution") {
        const Timestamp t = now_utc();
        CHECK(parse_timestamp(format_timestamp(t)) == t);
        const Timestamp fixed = parse_timestamp("2021-03-04 05:06:07.000123");
        CHECK(format_timestamp(fixed) == "2021-03-04 05:06:07.000123");
        CHECK(parse_timestamp("2021-03-04T05:06:07Z") == parse_timestamp("2021-03-04 05:06:07"));
        CHECK(parse_timestamp("2021-03-04 05:06:07.5+00") == parse_timestamp("2021-03-04 05:06:07.500000"));
        CHECK_THROWS(parse_timestamp("yesterday"));
    }
}

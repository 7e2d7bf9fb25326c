#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "simstudy/errors.hpp"
#include "simstudy/export.hpp"
#include "test_support.hpp"

using namespace simstudy;
using namespace simstudy::testing;

namespace {

/// Minimal RFC-4180 reader: CRLF records, quoted fields with doubled quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            row.push_back(field);
            rows.push_back(row);
            row.clear();
            field.clear();
            ++i;
        } else {
            field += c;
        }
    }
    REQUIRE(row.empty());
    REQUIRE(field.empty());
    return rows;
}

std::string csv_of(const Table& t) {
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

}  // namespace

TEST_SUITE("export") {
    TEST_CASE("formats parse by name") {
        CHECK(parse_export_format("csv") == ExportFormat::csv);
        CHECK(parse_export_format("json") == ExportFormat::json);
        CHECK_THROWS(parse_export_format("xml"));
    }

    TEST_CASE("cells") {
        CHECK(std::get<std::int64_t>(to_cell(Value{true})) == 1);
        CHECK(std::get<std::string>(to_cell(Value{"ols"})) == "ols");
        CHECK(cell_text(Cell{0.1}) == "0.1");
        CHECK(cell_text(Cell{std::int64_t{100}}) == "100");
        CHECK(cell_text(Cell{}) == "");
    }

    TEST_CASE("empty summary is a header-only csv") {
        const auto t = summary_table({}, {"data_distribution", "no_instances", "method"}, {"score"});
        CHECK(csv_of(t) == "data_distribution,no_instances,method,n,score_mean,score_se,score\r\n");
    }

    TEST_CASE("summary table has mean, se and the formatted column") {
        AggregateSummary s;
        s.group = Configuration{{"method", "ols"}, {"no_instances", 100}};
        s.n = 200;
        s.outcomes["score"] = {0.8031, 0.0349};
        const auto t = summary_table({s}, {"no_instances", "method"}, {"score"});
        const auto rows = parse_csv(csv_of(t));
        REQUIRE(rows.size() == 2);
        CHECK(rows[1] == std::vector<std::string>{"100", "ols", "200", "0.8031", "0.0349", "0.803 (0.035)"});
        const auto bare = summary_table({s}, {"method"}, {"score"}, false);
        CHECK(bare.columns == std::vector<std::string>{"method", "n", "score_mean", "score_se"});
    }

    TEST_CASE("csv round trip with quoting") {
        Table t;
        t.columns = {"a", "b,c", "d"};
        t.rows = {{std::string("x\"y"), 0.1, std::int64_t{-3}},
                  {std::string("line\nbreak"), Cell{}, 1e-300},
                  {std::string("plain"), 2.5, std::int64_t{0}}};
        const auto rows = parse_csv(csv_of(t));
        REQUIRE(rows.size() == 4);
        CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d"});
        CHECK(rows[1] == std::vector<std::string>{"x\"y", "0.1", "-3"});
        CHECK(rows[2][0] == "line\nbreak");
        CHECK(rows[2][1] == "");
        CHECK(std::stod(rows[2][2]) == 1e-300);
        CHECK(csv_of(t).find("\"b,c\"") != std::string::npos);
    }

    TEST_CASE("rejection and ecdf column layout") {
        RejectionRateRow r;
        r.group = Configuration{{"hypothesis", "null"}, {"method", "ks"}};
        r.n = 10;
        r.avg_p = {0.5, 0.01};
        r.rate_1pct = {0.01, 0.001};
        r.rate_5pct = {0.05, 0.002};
        const auto t = rejection_table_export({r}, {"hypothesis", "method"});
        CHECK(t.columns ==
              std::vector<std::string>{"hypothesis", "method", "avg_p", "se_p", "err_1pct", "se_1", "err_5pct", "se_5"});
        REQUIRE(t.rows.size() == 1);
        CHECK(std::get<double>(t.rows[0][4]) == 0.01);

        const std::vector<double> p{0.2, 0.4};
        const auto e = ecdf_table({{Configuration{{"method", "ks"}}, EcdfCurve(p)}}, {"method"});
        CHECK(e.columns == std::vector<std::string>{"method", "x", "ecdf", "band", "lower", "upper"});
        CHECK(e.rows.size() == 2);
    }

    TEST_CASE("json output parses with keys in column order") {
        Table t;
        t.columns = {"method", "n", "score_mean", "missing"};
        t.rows = {{std::string("ols"), std::int64_t{3}, 0.25, Cell{}}};
        std::ostringstream os;
        write_json(t, os);
        const auto j = nlohmann::ordered_json::parse(os.str());
        REQUIRE(j.is_array());
        REQUIRE(j.size() == 1);
        CHECK(j[0]["method"] == "ols");
        CHECK(j[0]["n"] == 3);
        CHECK(j[0]["score_mean"] == 0.25);
        CHECK(j[0]["missing"].is_null());
        std::vector<std::string> keys;
        for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
        CHECK(keys == t.columns);
        std::ostringstream empty;
        write_json(Table{{"a"}, {}}, empty);
        CHECK(nlohmann::json::parse(empty.str()).empty());
    }

    TEST_CASE("export_table writes files and reports unwritable paths") {
        TempDir dir;
        Table t{{"a"}, {{std::int64_t{1}}}};
        export_table(t, ExportFormat::csv, dir.file("out.csv"));
        std::ifstream in(dir.file("out.csv"), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        CHECK(ss.str() == "a\r\n1\r\n");
        CHECK_THROWS_AS(export_table(t, ExportFormat::csv, dir.file("no/such/dir/out.csv")), IoError);
    }
}

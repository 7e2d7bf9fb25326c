#include <memory>

#include "doctest.h"
#include "simstudy/errors.hpp"
#include "simstudy/retry.hpp"
#include "simstudy/storage.hpp"
#include "test_support.hpp"

using namespace simstudy;
using namespace simstudy::testing;

namespace {

/// Shared switchboard for FlakyConnection: how many upcoming calls fail.
struct Outage {
    int fail_calls = 0;
    bool fail_after_commit = false;  // commit succeeds but the caller sees a dropped connection
    int calls = 0;
};

/// Delegates to a real connection, failing calls while an outage is active.
class FlakyConnection : public SqlConnection {
public:
    FlakyConnection(std::unique_ptr<SqlConnection> inner, std::shared_ptr<Outage> outage)
        : inner_(std::move(inner)), outage_(std::move(outage)) {}

    Backend backend() const noexcept override { return inner_->backend(); }
    std::int64_t execute(std::string_view sql, std::span<const SqlValue> params) override {
        gate();
        return inner_->execute(sql, params);
    }
    std::vector<SqlRow> query(std::string_view sql, std::span<const SqlValue> params) override {
        gate();
        return inner_->query(sql, params);
    }
    void begin_write(std::string_view key) override {
        gate();
        inner_->begin_write(key);
    }
    void begin_read() override {
        gate();
        inner_->begin_read();
    }
    void commit() override {
        gate();
        inner_->commit();
        if (outage_->fail_after_commit) {
            outage_->fail_after_commit = false;
            throw ConnectionError("connection reset after commit");
        }
    }
    void rollback() noexcept override { inner_->rollback(); }
    bool in_transaction() const noexcept override { return inner_->in_transaction(); }
    std::string placeholder(int i) const override { return inner_->placeholder(i); }
    std::vector<ColumnInfo> table_columns(const std::string& t) override {
        gate();
        return inner_->table_columns(t);
    }

private:
    void gate() {
        ++outage_->calls;
        if (outage_->fail_calls > 0) {
            --outage_->fail_calls;
            if (inner_->in_transaction()) inner_->rollback();
            throw ConnectionError("injected outage");
        }
    }

    std::unique_ptr<SqlConnection> inner_;
    std::shared_ptr<Outage> outage_;
};

struct FlakyStore {
    TempDir dir;
    std::shared_ptr<Outage> outage = std::make_shared<Outage>();
    std::vector<Seconds> sleeps;
    ResultSchema schema{"flaky", {{"method", FieldKind::text, FieldRole::config},
                                  {"score", FieldKind::real, FieldRole::outcome}}};
    ResultStore store;

    explicit FlakyStore(RetryPolicy policy = {})
        : store([this] { return std::make_unique<FlakyConnection>(open_sqlite(dir.file("f.db")), outage); },
                Backend::sqlite, policy, [this](Seconds s) { sleeps.push_back(s); }) {
        store.init_table(schema);
    }

    ResultRecord record(std::uint64_t seed) const {
        ResultRecord r;
        r.config = Configuration{{"method", "ols"}};
        r.outcomes = {{"score", 0.75}};
        r.meta = {seed, 0.1, "w-0", now_utc()};
        return r;
    }
};

std::vector<double> as_seconds(const std::vector<Seconds>& v) {
    std::vector<double> out;
    for (auto s : v) out.push_back(s.count());
    return out;
}

}  // namespace

TEST_SUITE("retry") {
    TEST_CASE("healthy action runs once without sleeping") {
        int calls = 0;
        std::vector<Seconds> sleeps;
        const int r = with_retry(RetryPolicy{}, [&] { return ++calls; }, [&](Seconds s) { sleeps.push_back(s); });
        CHECK(r == 1);
        CHECK(calls == 1);
        CHECK(sleeps.empty());
    }

    TEST_CASE("backoff doubles from the base and is capped") {
        int failures = 9;
        std::vector<Seconds> sleeps;
        std::vector<int> attempts;
        with_retry(
            RetryPolicy{},
            [&] {
                if (failures-- > 0) throw ConnectionError("down");
                return 0;
            },
            [&](Seconds s) { sleeps.push_back(s); },
            [&](int attempt, Seconds, const ConnectionError&) { attempts.push_back(attempt); });
        CHECK(as_seconds(sleeps) == std::vector<double>{0.5, 1, 2, 4, 8, 16, 30, 30, 30});
        CHECK(attempts == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    }

    TEST_CASE("waiting past max_wait gives up") {
        RetryPolicy policy;
        policy.max_wait = Seconds{3.0};
        std::vector<Seconds> sleeps;
        int calls = 0;
        try {
            with_retry(
                policy,
                [&]() -> int {
                    ++calls;
                    throw ConnectionError("down");
                },
                [&](Seconds s) { sleeps.push_back(s); });
            FAIL("expected RetryExhaustedError");
        } catch (const RetryExhaustedError& e) {
            CHECK(e.attempts() == 3);
        }
        CHECK(calls == 3);
        CHECK(as_seconds(sleeps) == std::vector<double>{0.5, 1});
    }

    TEST_CASE("non-transient errors are not retried") {
        int calls = 0;
        CHECK_THROWS_AS(with_retry(
                            RetryPolicy{},
                            [&]() -> int {
                                ++calls;
                                throw StorageError("constraint");
                            },
                            [](Seconds) {}),
                        StorageError);
        CHECK(calls == 1);
    }

    TEST_CASE("invalid policies are rejected") {
        RetryPolicy p;
        p.base_backoff = Seconds{0};
        CHECK_THROWS(p.validate());
    }

    TEST_CASE("outage of two backoff windows: insert succeeds, row present") {
        FlakyStore fs;
        fs.outage->fail_calls = 2;
        CHECK(fs.store.insert_result(fs.schema, fs.record(1)));
        CHECK(as_seconds(fs.sleeps) == std::vector<double>{0.5, 1});
        CHECK(fs.store.count_results(fs.schema, fs.record(1).config) == 1);
    }

    TEST_CASE("outage past max_wait hands back the record; re-submission is exact") {
        RetryPolicy policy;
        policy.max_wait = Seconds{10.0};
        FlakyStore fs(policy);
        fs.outage->fail_calls = 1000;
        const auto rec = fs.record(7);
        try {
            fs.store.insert_result(fs.schema, rec);
            FAIL("expected PendingRecordError");
        } catch (const PendingRecordError& e) {
            CHECK(e.pending() == rec);
        }
        fs.outage->fail_calls = 0;
        CHECK(fs.store.count_results(fs.schema, rec.config) == 0);
        CHECK(fs.store.insert_result(fs.schema, rec));
        CHECK_FALSE(fs.store.insert_result(fs.schema, rec));
        CHECK(fs.store.count_results(fs.schema, rec.config) == 1);
    }

    TEST_CASE("lost commit acknowledgement does not duplicate the row") {
        FlakyStore fs;
        fs.outage->fail_after_commit = true;
        fs.store.insert_result(fs.schema, fs.record(3));
        CHECK(fs.sleeps.size() == 1);
        CHECK(fs.store.count_results(fs.schema, fs.record(3).config) == 1);
    }

    TEST_CASE("reads and counts retry too") {
        FlakyStore fs;
        fs.store.insert_result(fs.schema, fs.record(1));
        fs.outage->fail_calls = 3;
        CHECK(fs.store.read_results(fs.schema).size() == 1);
        fs.outage->fail_calls = 2;
        CHECK(fs.store.count_results(fs.schema, fs.record(1).config) == 1);
        CHECK(fs.sleeps.size() == 5);
    }
}

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simstudy/retry.hpp"
#include "simstudy/schema.hpp"
#include "simstudy/sql.hpp"

namespace simstudy {

/// A leased claim on one replication slot of a configuration.
struct Reservation {
    std::int64_t id = 0;
    Configuration config;
    std::string holder;
    Timestamp lease_expiry{};
};

/// The store stayed unreachable past the retry budget while a computed
/// record was waiting to be written. The record is handed back so the
/// caller can re-submit it; re-submission is idempotent because rows are
/// unique on (worker_id, seed).
class PendingRecordError : public RetryExhaustedError {
public:
    PendingRecordError(const RetryExhaustedError& cause, ResultRecord pending)
        : RetryExhaustedError(cause.what(), cause.attempts()), pending_(std::move(pending)) {}
    const ResultRecord& pending() const noexcept { return pending_; }

private:
    ResultRecord pending_;
};

using ConnectionFactory = std::function<std::unique_ptr<SqlConnection>()>;

/// Handle to a result store. Every public operation runs under the retry
/// policy: transient connection failures are retried with exponential
/// backoff, reconnecting as needed. One thread at a time; open one handle
/// per worker thread.
class ResultStore {
public:
    ResultStore(ConnectionFactory factory, Backend backend, RetryPolicy policy = {}, Sleeper sleep = real_sleep);

    /// Parses `dsn` and connects on first use.
    static ResultStore open(std::string_view dsn, RetryPolicy policy = {}, Sleeper sleep = real_sleep);

    ResultStore(ResultStore&&) noexcept = default;
    ResultStore& operator=(ResultStore&&) noexcept = default;

    Backend backend() const noexcept { return backend_; }
    const RetryPolicy& retry_policy() const noexcept { return policy_; }

    /// Reports each retry (attempt number, wait, cause).
    void on_retry(std::function<void(int, Seconds, const ConnectionError&)> cb) { on_retry_ = std::move(cb); }

    /// Creates the result table (schema fields plus meta columns) and its
    /// reservation table. No-op when a compatible table exists; throws
    /// SchemaMismatchError when an incompatible one does.
    void init_table(const ResultSchema& schema);

    bool table_exists(const ResultSchema& schema);

    /// Rows whose config columns equal `config`.
    std::int64_t count_results(const ResultSchema& schema, const Configuration& config);

    /// Completed counts for each configuration, in input order. With
    /// `live_at`, unexpired reservations are added. Rows whose config values
    /// are not in `configs` are ignored.
    std::vector<std::int64_t> count_many(const ResultSchema& schema, std::span<const Configuration> configs,
                                         std::optional<Timestamp> live_at = std::nullopt);

    /// Writes one row in a single transaction. Returns false when a row with
    /// the same (worker_id, seed) already exists. Throws PendingRecordError
    /// if the store stays unavailable past the retry budget.
    bool insert_result(const ResultSchema& schema, const ResultRecord& record);

    /// All rows (or those matching every assignment in `selection`), in
    /// insertion order, blobs decoded.
    std::vector<ResultRecord> read_results(const ResultSchema& schema, const Configuration& selection = {});

    /// Atomically checks completed + live reservations < max_count and, if
    /// so, records a lease for `holder` until now + lease. Returns nullopt
    /// when the configuration is saturated.
    std::optional<Reservation> reserve(const ResultSchema& schema, const Configuration& config,
                                       std::int64_t max_count, const std::string& holder, Seconds lease,
                                       Timestamp now);

    void release(const ResultSchema& schema, const Reservation& reservation);

    /// Inserts the record and drops the reservation in one transaction.
    bool complete(const ResultSchema& schema, const Reservation& reservation, const ResultRecord& record);

    /// Live (unexpired at `now`) reservations.
    std::int64_t count_reservations(const ResultSchema& schema, Timestamp now);

    /// Deletes every row and reservation. Returns rows deleted; 0 when the
    /// table does not exist.
    std::int64_t purge(const ResultSchema& schema);

    /// Runs `fn(connection)` under the retry policy.
    template <class Fn>
    auto with_retry(Fn&& fn) {
        return simstudy::with_retry(policy_, [&] { return fn(connection()); }, sleep_, on_retry_);
    }

    /// Underlying connection (connecting if needed). Exposed for diagnostics and tests.
    SqlConnection& connection();

private:
    std::unique_ptr<SqlConnection> conn_;
    ConnectionFactory factory_;
    Backend backend_;
    RetryPolicy policy_;
    Sleeper sleep_;
    std::function<void(int, Seconds, const ConnectionError&)> on_retry_;
};

/// Table holding leases for `schema`'s table.
std::string reservation_table(const ResultSchema& schema);

}  // namespace simstudy

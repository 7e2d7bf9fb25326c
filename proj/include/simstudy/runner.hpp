#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simstudy/paramspace.hpp"
#include "simstudy/schema.hpp"
#include "simstudy/stats/rng.hpp"
#include "simstudy/storage.hpp"

namespace simstudy {

/// The user's replication body: generate data, fit, evaluate. Must be
/// deterministic in (config, seed) and return exactly the schema's outcome
/// fields. It may also return a float "elapsed_time" (seconds spent on the
/// fit + evaluate section); otherwise the whole call is timed.
using SimulationFn = std::function<OutcomeMap(const Configuration&, std::uint64_t seed)>;

inline constexpr const char* kElapsedTimeKey = "elapsed_time";

enum class ClaimMode {
    /// Count, then run if below max_count. Concurrent workers may overshoot
    /// by at most workers − 1 rows per configuration.
    check_then_run,
    /// Take a leased reservation first; exact counts.
    reserve,
};

const char* to_string(ClaimMode mode);

struct RunOptions {
    std::int64_t max_count = 0;
    ClaimMode mode = ClaimMode::check_then_run;
    std::string worker_id = "worker-0";
    std::uint64_t master_seed = 0;
    /// Upper bound on loop iterations (claims attempted); unlimited when empty.
    std::optional<std::int64_t> max_passes;
    Seconds lease{3600.0};
    /// Reservation clock; tests substitute a controllable one.
    std::function<Timestamp()> clock = now_utc;
    /// Checked between replications; set to request a graceful stop.
    const std::atomic<bool>* stop = nullptr;
    /// Called after each stored replication.
    std::function<void(const ResultRecord&)> on_stored;
};

/// The simulation function failed. Nothing was stored.
class ReplicationFailedError : public Error {
public:
    ReplicationFailedError(Configuration config, std::uint64_t seed, const std::string& cause);
    const Configuration& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    Configuration config_;
    std::uint64_t seed_;
};

/// A uniformly random configuration whose count (completed, plus live
/// reservations in reserve mode) is below max_count; nullopt when all are
/// saturated.
std::optional<Configuration> next_config(ResultStore& store, const ResultSchema& schema,
                                         const std::vector<Configuration>& configs, const RunOptions& opts,
                                         stats::Rng& rng);

/// Calls fn(config, seed) and wraps the outcome into a record stamped with
/// seed, elapsed time, worker id and creation time.
ResultRecord run_replication(const SimulationFn& fn, const Configuration& config, std::uint64_t seed,
                             const std::string& worker_id);

struct RunReport {
    std::int64_t replications_done = 0;
    std::int64_t passes = 0;
    bool stopped = false;
    /// Final completed counts per configuration (as observed at the end).
    std::vector<std::pair<Configuration, std::int64_t>> per_config_counts;
};

/// Repeats claim → run_replication → store until every surviving
/// configuration has max_count rows, max_passes is exhausted, or a stop is
/// requested. Replication seeds come from (master_seed, worker_id, counter).
RunReport run_study(const ParamSpace& space, const FilterPredicate& filter, const ResultSchema& schema,
                    const SimulationFn& fn, ResultStore& store, const RunOptions& opts);

}  // namespace simstudy

#include "simstudy/runner.hpp"

#include <algorithm>

namespace simstudy {

namespace {

std::vector<std::size_t> open_slots(ResultStore& store, const ResultSchema& schema,
                                    const std::vector<Configuration>& configs, const RunOptions& opts) {
    std::optional<Timestamp> live_at;
    if (opts.mode == ClaimMode::reserve) live_at = opts.clock();
    const auto counts = store.count_many(schema, configs, live_at);
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < configs.size(); ++i)
        if (counts[i] < opts.max_count) open.push_back(i);
    return open;
}

bool stop_requested(const RunOptions& opts) {
    return opts.stop && opts.stop->load(std::memory_order_relaxed);
}

}  // namespace

const char* to_string(ClaimMode mode) {
    switch (mode) {
        case ClaimMode::check_then_run: return "check";
        case ClaimMode::reserve: return "reserve";
    }
    return "?";
}

ReplicationFailedError::ReplicationFailedError(Configuration config, std::uint64_t seed, const std::string& cause)
    : Error("replication failed for (" + config.str() + ") with seed " + std::to_string(seed) + ": " + cause),
      config_(std::move(config)),
      seed_(seed) {}

std::optional<Configuration> next_config(ResultStore& store, const ResultSchema& schema,
                                         const std::vector<Configuration>& configs, const RunOptions& opts,
                                         stats::Rng& rng) {
    const auto open = open_slots(store, schema, configs, opts);
    if (open.empty()) return std::nullopt;
    return configs[open[static_cast<std::size_t>(rng.below(open.size()))]];
}

ResultRecord run_replication(const SimulationFn& fn, const Configuration& config, std::uint64_t seed,
                             const std::string& worker_id) {
    using Clock = std::chrono::steady_clock;
    OutcomeMap outcomes;
    const auto start = Clock::now();
    try {
        outcomes = fn(config, seed);
    } catch (const std::exception& e) {
        throw ReplicationFailedError(config, seed, e.what());
    } catch (...) {
        throw ReplicationFailedError(config, seed, "unknown exception");
    }
    const auto stop = Clock::now();

    ResultRecord rec;
    rec.config = config;
    rec.meta.seed = seed;
    rec.meta.worker_id = worker_id;
    rec.meta.elapsed_time = std::chrono::duration<double>(stop - start).count();
    if (auto it = outcomes.find(kElapsedTimeKey); it != outcomes.end()) {
        if (const auto* reported = std::get_if<double>(&it->second)) rec.meta.elapsed_time = *reported;
        else throw ReplicationFailedError(config, seed, "elapsed_time must be a float");
        outcomes.erase(it);
    }
    rec.outcomes = std::move(outcomes);
    rec.meta.created_at = now_utc();
    return rec;
}

RunReport run_study(const ParamSpace& space, const FilterPredicate& filter, const ResultSchema& schema,
                    const SimulationFn& fn, ResultStore& store, const RunOptions& opts) {
    if (opts.max_count < 0) throw Error("max_count must be >= 0");
    if (opts.worker_id.empty()) throw Error("worker_id must be non-empty");
    schema.check_covers(space);
    const std::vector<Configuration> configs = apply_filter(cartesian_product(space), filter);

    RunReport report;
    stats::Rng rng(stats::scheduler_seed(opts.master_seed, opts.worker_id));
    std::uint64_t counter = 0;

    auto store_record = [&](const ResultRecord& rec, const std::optional<Reservation>& lease) {
        const bool inserted = lease ? store.complete(schema, *lease, rec) : store.insert_result(schema, rec);
        if (inserted) {
            ++report.replications_done;
            if (opts.on_stored) opts.on_stored(rec);
        }
    };

    while (opts.max_count > 0) {
        if (stop_requested(opts)) {
            report.stopped = true;
            break;
        }
        if (opts.max_passes && report.passes >= *opts.max_passes) break;
        ++report.passes;

        std::optional<Configuration> config;
        std::optional<Reservation> lease;
        if (opts.mode == ClaimMode::check_then_run) {
            config = next_config(store, schema, configs, opts, rng);
            if (!config) break;
        } else {
            auto open = open_slots(store, schema, configs, opts);
            if (open.empty()) break;
            rng.shuffle(std::span<std::size_t>(open));
            for (std::size_t idx : open) {
                lease = store.reserve(schema, configs[idx], opts.max_count, opts.worker_id, opts.lease, opts.clock());
                if (lease) {
                    config = configs[idx];
                    break;
                }
            }
            if (!config) continue;  // lost every race this pass; recount
        }

        const std::uint64_t seed = stats::replication_seed(opts.master_seed, opts.worker_id, counter++);
        ResultRecord rec;
        try {
            rec = run_replication(fn, *config, seed, opts.worker_id);
            validate_record(schema, rec);
        } catch (const ReplicationFailedError&) {
            if (lease) store.release(schema, *lease);
            throw;
        } catch (const SchemaError& e) {
            if (lease) store.release(schema, *lease);
            throw ReplicationFailedError(*config, seed, e.what());
        }
        store_record(rec, lease);
    }

    const auto counts = store.count_many(schema, configs);
    for (std::size_t i = 0; i < configs.size(); ++i) report.per_config_counts.emplace_back(configs[i], counts[i]);
    return report;
}

}  // namespace simstudy

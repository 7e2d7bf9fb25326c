#include "simstudy/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "simstudy/analysis.hpp"
#include "simstudy/errors.hpp"
#include "simstudy/storage.hpp"
#include "simstudy/studies.hpp"

namespace simstudy {

namespace {

RetryPolicy policy_for(const CliConfig& cfg) {
    RetryPolicy p;
    p.max_wait = Seconds{cfg.max_wait_seconds};
    return p;
}

std::int64_t max_count_for(const CliConfig& cfg, const StudyDefinition& study) {
    return cfg.max_count.value_or(study.default_max_count);
}

std::string default_worker_prefix() {
    char host[256] = {};
    if (gethostname(host, sizeof host - 1) != 0 || host[0] == '\0') std::strcpy(host, "host");
    return std::string(host) + "-" + std::to_string(getpid());
}

/// Maps a library failure onto an exit code and reports it.
int report_failure(std::ostream& err, const char* command) {
    try {
        throw;
    } catch (const DsnError& e) {
        err << command << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        err << command << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << command << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const PendingRecordError& e) {
        err << command << ": store unavailable, a computed replication for (" << e.pending().config.str()
            << ") could not be saved: " << e.what() << '\n';
        return kExitStorage;
    } catch (const StorageError& e) {
        err << command << ": storage failure: " << e.what() << '\n';
        return kExitStorage;
    } catch (const std::exception& e) {
        err << command << ": " << e.what() << '\n';
        return 1;
    }
}

/// Left-aligned plain-text table.
void print_text_table(std::ostream& out, const Table& t) {
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    std::vector<std::vector<std::string>> text;
    for (const auto& row : t.rows) {
        auto& r = text.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
            r.push_back(cell_text(row[i]));
            width[i] = std::max(width[i], r.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << "  ";
            if (i + 1 == fields.size()) out << fields[i];
            else out << std::left << std::setw(static_cast<int>(width[i])) << fields[i];
        }
        out << '\n';
    };
    line(t.columns);
    for (const auto& r : text) line(r);
}

Table status_table(const std::vector<Configuration>& configs, const std::vector<std::int64_t>& counts,
                   const ParamSpace& space, std::int64_t max_count) {
    Table t;
    for (const auto& axis : space.axes()) t.columns.push_back(axis.name);
    t.columns.insert(t.columns.end(), {"count", "target", "status"});
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<Cell> row;
        for (const auto& [name, value] : configs[i].assignments()) row.push_back(to_cell(value));
        row.emplace_back(counts[i]);
        row.emplace_back(max_count);
        row.emplace_back(std::string(counts[i] >= max_count ? "done" : "open"));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<std::string> numeric_outcomes(const ResultSchema& schema) {
    std::vector<std::string> names;
    for (const auto& f : schema.outcome_fields())
        if (f.kind == FieldKind::real || f.kind == FieldKind::integer) names.push_back(f.name);
    return names;
}

std::filesystem::path sibling(const std::filesystem::path& base, const std::string& suffix) {
    auto p = base;
    p.replace_filename(base.stem().string() + "." + suffix + base.extension().string());
    return p;
}

}  // namespace

int cmd_init(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto study = find_study(cfg.study, cfg.full);
        auto store = ResultStore::open(cfg.dsn, policy_for(cfg));
        store.init_table(study.schema);
        out << "initialized table " << study.schema.table_name() << '\n';
        return kExitOk;
    } catch (...) {
        return report_failure(err, "init");
    }
}

int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err, std::atomic<bool>* stop) {
    std::atomic<bool> local_stop{false};
    if (!stop) stop = &local_stop;
    try {
        if (cfg.workers < 1) throw DsnError("--workers must be at least 1");
        const auto study = find_study(cfg.study, cfg.full);
        const std::int64_t max_count = max_count_for(cfg, study);
        if (max_count < 0) throw DsnError("--max-count must be >= 0");

        std::uint64_t seed;
        std::string prefix;
        if (cfg.master_seed) {
            seed = *cfg.master_seed;
            prefix = cfg.worker_id.value_or("w");
        } else {
            std::random_device rd;
            seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
            prefix = cfg.worker_id.value_or(default_worker_prefix());
        }

        auto store = ResultStore::open(cfg.dsn, policy_for(cfg));
        store.init_table(study.schema);
        if (max_count == 0) {
            out << "nothing to do (max-count 0)\n";
            return kExitOk;
        }
        out << "running " << study.name << " with " << cfg.workers << " worker(s), mode " << to_string(cfg.mode)
            << ", seed " << seed << ", max-count " << max_count << '\n';

        std::mutex failure_mutex;
        std::exception_ptr failure;
        std::atomic<std::int64_t> done{0};
        auto worker = [&](int index) {
            try {
                auto own = ResultStore::open(cfg.dsn, policy_for(cfg));
                RunOptions opts;
                opts.max_count = max_count;
                opts.mode = cfg.mode;
                opts.worker_id = prefix + "-" + std::to_string(index);
                opts.master_seed = seed;
                opts.lease = Seconds{cfg.lease_seconds};
                opts.stop = stop;
                const auto report = run_study(study.space, study.filter, study.schema, study.fn, own, opts);
                done += report.replications_done;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop->store(true);
            }
        };
        std::vector<std::thread> threads;
        for (int i = 0; i < cfg.workers; ++i) threads.emplace_back(worker, i);
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);

        const auto configs = apply_filter(cartesian_product(study.space), study.filter);
        const auto counts = store.count_many(study.schema, configs);
        print_text_table(out, status_table(configs, counts, study.space, max_count));
        out << done.load() << " replication(s) stored"
            << (stop->load() ? "; stopped on request" : "") << '\n';
        return kExitOk;
    } catch (...) {
        return report_failure(err, "run");
    }
}

int cmd_status(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto study = find_study(cfg.study, cfg.full);
        const std::int64_t max_count = max_count_for(cfg, study);
        auto store = ResultStore::open(cfg.dsn, policy_for(cfg));
        const auto configs = apply_filter(cartesian_product(study.space), study.filter);
        std::vector<std::int64_t> counts(configs.size(), 0);
        if (store.table_exists(study.schema)) counts = store.count_many(study.schema, configs);
        print_text_table(out, status_table(configs, counts, study.space, max_count));
        const auto open = std::count_if(counts.begin(), counts.end(), [&](auto c) { return c < max_count; });
        out << (configs.size() - static_cast<std::size_t>(open)) << "/" << configs.size()
            << " configuration(s) done\n";
        return kExitOk;
    } catch (...) {
        return report_failure(err, "status");
    }
}

int cmd_export(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto study = find_study(cfg.study, cfg.full);
        auto store = ResultStore::open(cfg.dsn, policy_for(cfg));
        std::vector<ResultRecord> records;
        if (store.table_exists(study.schema)) records = store.read_results(study.schema);

        std::vector<std::pair<std::string, std::function<Table()>>> tables;
        tables.emplace_back("summary", [&] {
            return summary_table(aggregate(records, study.group_axes), study.group_axes,
                                 numeric_outcomes(study.schema));
        });
        if (study.pvalue_outcome) {
            tables.emplace_back("rejection", [&] {
                return rejection_table_export(rejection_table(records, study.group_axes, *study.pvalue_outcome),
                                              study.group_axes);
            });
            tables.emplace_back("ecdf", [&] {
                std::vector<LabeledCurve> curves;
                for (const auto& row : rejection_table(records, study.group_axes, *study.pvalue_outcome))
                    curves.push_back({row.group, ecdf(outcome_values(records, *study.pvalue_outcome, row.group))});
                return ecdf_table(curves, study.group_axes);
            });
        }

        if (cfg.table) {
            auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) { return t.first == *cfg.table; });
            if (it == tables.end())
                throw DsnError("study " + study.name + " has no '" + *cfg.table + "' table");
            tables = {*it};
        }

        if (!cfg.output) {
            // stdout takes a single document
            write_table(tables.front().second(), cfg.format, out);
            return kExitOk;
        }
        const std::filesystem::path base(*cfg.output);
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const auto path = i == 0 ? base : sibling(base, tables[i].first);
            export_table(tables[i].second(), cfg.format, path);
            err << "wrote " << path.string() << '\n';
        }
        return kExitOk;
    } catch (...) {
        return report_failure(err, "export");
    }
}

int cmd_purge(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto study = find_study(cfg.study, cfg.full);
        if (!cfg.yes) {
            err << "purge: refusing to delete rows of " << study.schema.table_name() << " without --yes\n";
            return kExitRefused;
        }
        auto store = ResultStore::open(cfg.dsn, policy_for(cfg));
        const auto removed = store.purge(study.schema);
        out << "deleted " << removed << " row(s) from " << study.schema.table_name() << '\n';
        return kExitOk;
    } catch (...) {
        return report_failure(err, "purge");
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::atomic<bool>* stop) {
    CLI::App app{"Distributed Monte Carlo simulation studies on a shared SQL store", "simstudy"};
    app.require_subcommand(1);
    app.fallthrough();

    CliConfig cfg;
    std::int64_t max_count = 0;
    std::uint64_t seed = 0;
    std::string mode = "check", format = "csv", output, table, worker_id;

    app.add_option("--db", cfg.dsn, "Store: file path, sqlite:PATH or postgresql://...")->envname("SSTUDY_DB");
    app.add_option("--study", cfg.study, "Study name")
        ->check(CLI::IsMember(study_names()))
        ->required();
    auto* max_opt = app.add_option("--max-count", max_count, "Replications per configuration");
    app.add_flag("--full", cfg.full, "Include the optional large configurations");
    app.add_option("--max-wait", cfg.max_wait_seconds, "Seconds to keep retrying an unreachable store")
        ->check(CLI::PositiveNumber);

    auto* init = app.add_subcommand("init", "Create the study's tables");
    auto* run = app.add_subcommand("run", "Run replications until every configuration is saturated");
    run->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "Master seed (random when omitted)");
    run->add_option("--mode", mode, "Claim discipline")->check(CLI::IsMember({"check", "reserve"}));
    auto* wid_opt = run->add_option("--worker-id", worker_id, "Worker id prefix");
    run->add_option("--lease", cfg.lease_seconds, "Reservation lease in seconds")->check(CLI::PositiveNumber);
    auto* status = app.add_subcommand("status", "Show completed counts per configuration");
    auto* exp = app.add_subcommand("export", "Write summary tables");
    auto* out_opt = exp->add_option("--out", output, "Output file (stdout when omitted)");
    exp->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    auto* table_opt = exp->add_option("--table", table, "summary, rejection or ecdf");
    auto* purge = app.add_subcommand("purge", "Delete all rows of the study");
    purge->add_flag("--yes", cfg.yes, "Confirm deletion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (cfg.dsn.empty()) {
        err << "no store given: pass --db or set SSTUDY_DB\n";
        return kExitConfig;
    }
    if (max_opt->count()) cfg.max_count = max_count;
    if (seed_opt->count()) cfg.master_seed = seed;
    if (wid_opt->count()) cfg.worker_id = worker_id;
    if (out_opt->count()) cfg.output = output;
    if (table_opt->count()) cfg.table = table;
    cfg.mode = mode == "reserve" ? ClaimMode::reserve : ClaimMode::check_then_run;
    cfg.format = parse_export_format(format);

    if (init->parsed()) return cmd_init(cfg, out, err);
    if (run->parsed()) return cmd_run(cfg, out, err, stop);
    if (status->parsed()) return cmd_status(cfg, out, err);
    if (exp->parsed()) return cmd_export(cfg, out, err);
    if (purge->parsed()) return cmd_purge(cfg, out, err);
    return kExitConfig;
}

}  // namespace simstudy

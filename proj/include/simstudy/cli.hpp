#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "simstudy/export.hpp"
#include "simstudy/runner.hpp"

namespace simstudy {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,   // bad flags, unknown study, bad dsn or incompatible table
    kExitStorage = 3,  // store failed or stayed unreachable
    kExitRefused = 4,  // destructive operation without --yes
};

struct CliConfig {
    std::string dsn;
    std::string study;
    /// Study default when empty.
    std::optional<std::int64_t> max_count;
    int workers = 1;
    /// Drawn at random when empty.
    std::optional<std::uint64_t> master_seed;
    ClaimMode mode = ClaimMode::check_then_run;
    std::optional<std::string> output;
    ExportFormat format = ExportFormat::csv;
    /// summary, rejection or ecdf; every table the study supports when empty.
    std::optional<std::string> table;
    bool yes = false;
    bool full = false;
    /// Worker i is "<prefix>-<i>". Default: "w" with --seed, else host-pid.
    std::optional<std::string> worker_id;
    double lease_seconds = 3600.0;
    double max_wait_seconds = 3600.0;
};

int cmd_init(const CliConfig& cfg, std::ostream& out, std::ostream& err);
/// `stop` may be set asynchronously (e.g. from a signal handler) to finish
/// in-flight replications and exit.
int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err, std::atomic<bool>* stop = nullptr);
int cmd_status(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_export(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_purge(const CliConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses `argv` and dispatches to a subcommand. The dsn falls back to the
/// SSTUDY_DB environment variable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            std::atomic<bool>* stop = nullptr);

}  // namespace simstudy

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "simstudy/cli.hpp"
#include "simstudy/storage.hpp"
#include "simstudy/studies.hpp"
#include "store_fixture.hpp"
#include "test_support.hpp"

using namespace simstudy;
using namespace simstudy::testing;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "simstudy");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::int64_t stored_rows(const std::string& dsn, const std::string& study) {
    auto store = ResultStore::open(dsn);
    const auto s = find_study(study);
    std::int64_t total = 0;
    for (const auto& c : cartesian_product(s.space)) total += store.count_results(s.schema, c);
    return total;
}

/// Starts the built binary with `args`; returns its pid.
pid_t spawn(const std::vector<std::string>& args) {
    std::fflush(stdout);
    const pid_t pid = ::fork();
    if (pid == 0) {
        std::vector<char*> argv{const_cast<char*>(SIMSTUDY_CLI_PATH)};
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        // silence the child's tables
        const int null_fd = ::open("/dev/null", O_WRONLY);
        ::dup2(null_fd, STDOUT_FILENO);
        ::execv(SIMSTUDY_CLI_PATH, argv.data());
        ::_exit(127);
    }
    return pid;
}

int wait_exit(pid_t pid) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("init is idempotent") {
        TempDir dir;
        const auto db = dir.file("s.db");
        CHECK(cli({"--db", db, "--study", "regression", "init"}).code == kExitOk);
        CHECK(cli({"--db", db, "--study", "regression", "init"}).code == kExitOk);
    }

    TEST_CASE("configuration errors exit 2") {
        TempDir dir;
        CHECK(cli({"--db", dir.file("no/such/dir/s.db"), "--study", "regression", "init"}).code == kExitConfig);
        CHECK(cli({"--db", dir.file("s.db"), "--study", "nope", "init"}).code == kExitConfig);
        CHECK(cli({"--db", dir.file("s.db"), "--study", "regression", "bogus"}).code == kExitConfig);
        CHECK(cli({"--db", "mysql://x", "--study", "regression", "init"}).code == kExitConfig);
        const auto r = cli({"--db", dir.file("s.db"), "--study", "regression", "export", "--out",
                            dir.file("no/such/dir/out.csv")});
        CHECK(r.code == kExitConfig);
    }

    TEST_CASE("max-count 0 runs nothing") {
        TempDir dir;
        const auto db = dir.file("s.db");
        const auto r = cli({"--db", db, "--study", "hypothesis", "--max-count", "0", "run"});
        CHECK(r.code == kExitOk);
        CHECK(stored_rows(db, "hypothesis") == 0);
    }

    TEST_CASE("run, status, export and purge") {
        TempDir dir;
        const auto db = dir.file("s.db");
        const auto run = cli({"--db", db, "--study", "hypothesis", "--max-count", "5", "run", "--workers", "2",
                              "--seed", "3"});
        REQUIRE(run.code == kExitOk);
        const auto rows = stored_rows(db, "hypothesis");
        // check-then-run may overshoot by at most workers − 1 per configuration
        CHECK(rows >= 12 * 5);
        CHECK(rows <= 12 * 6);

        const auto again = cli({"--db", db, "--study", "hypothesis", "--max-count", "5", "run", "--seed", "3"});
        CHECK(again.code == kExitOk);
        CHECK(stored_rows(db, "hypothesis") == rows);

        const auto st = cli({"--db", db, "--study", "hypothesis", "--max-count", "5", "status"});
        CHECK(st.code == kExitOk);
        CHECK(st.out.find("12/12 configuration(s) done") != std::string::npos);

        const auto csv = cli({"--db", db, "--study", "hypothesis", "export"});
        CHECK(csv.code == kExitOk);
        CHECK(csv.out.rfind("hypothesis,method,n_instances,n,", 0) == 0);

        const auto json = cli({"--db", db, "--study", "hypothesis", "export", "--format", "json", "--table", "rejection"});
        REQUIRE(json.code == kExitOk);
        const auto j = nlohmann::json::parse(json.out);
        CHECK(j.size() == 12);
        CHECK(j[0].contains("err_5pct"));

        const auto out = dir.file("t.csv");
        CHECK(cli({"--db", db, "--study", "hypothesis", "export", "--out", out}).code == kExitOk);
        CHECK(!slurp(out).empty());
        CHECK(!slurp(dir.file("t.rejection.csv")).empty());
        CHECK(!slurp(dir.file("t.ecdf.csv")).empty());

        const auto refused = cli({"--db", db, "--study", "hypothesis", "purge"});
        CHECK(refused.code == kExitRefused);
        CHECK(stored_rows(db, "hypothesis") == rows);
        CHECK(cli({"--db", db, "--study", "hypothesis", "purge", "--yes"}).code == kExitOk);
        CHECK(stored_rows(db, "hypothesis") == 0);
    }

    TEST_CASE("status and export on an absent table") {
        TempDir dir;
        const auto db = dir.file("s.db");
        const auto st = cli({"--db", db, "--study", "density", "status"});
        CHECK(st.code == kExitOk);
        CHECK(st.out.find("0/2 configuration(s) done") != std::string::npos);
        const auto ex = cli({"--db", db, "--study", "density", "export"});
        CHECK(ex.code == kExitOk);
        CHECK(ex.out == "no_instances,method,n,loss_mean,loss_se,loss\r\n");
    }

    TEST_CASE("store falls back to the environment variable") {
        TempDir dir;
        const auto db = dir.file("env.db");
        ::setenv("SSTUDY_DB", db.c_str(), 1);
        const auto r = cli({"--study", "density", "--max-count", "1", "run", "--seed", "1"});
        ::unsetenv("SSTUDY_DB");
        CHECK(r.code == kExitOk);
        CHECK(stored_rows(db, "density") == 2);
        CHECK(cli({"--study", "density", "status"}).code == kExitConfig);
    }

    TEST_CASE("purge of an absent table is a no-op") {
        TempDir dir;
        CHECK(cli({"--db", dir.file("s.db"), "--study", "density", "purge", "--yes"}).code == kExitOk);
    }

    TEST_CASE("a stop request ends the run gracefully") {
        TempDir dir;
        const auto db = dir.file("s.db");
        std::vector<std::string> args{"simstudy", "--db", db, "--study", "regression", "run", "--seed", "1"};
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::atomic<bool> stop{false};
        std::thread stopper([&] {
            for (;;) {
                try {
                    if (stored_rows(db, "regression") >= 3) break;
                } catch (const std::exception&) {
                    // table not created yet
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(5));
            }
            stop = true;
        });
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, &stop);
        stopper.join();
        CHECK(code == kExitOk);
        CHECK(out.str().find("stopped on request") != std::string::npos);
        const auto rows = stored_rows(db, "regression");
        CHECK(rows >= 3);
        CHECK(rows < 8 * 200);
    }

    TEST_CASE("two processes on one store stay within the overshoot bound") {
        const auto target = store_targets().back();
        CAPTURE(target.backend);
        const std::vector<std::string> base{"--db", target.dsn, "--study", "hypothesis", "--max-count", "5", "run"};
        auto a = base, b = base;
        a.insert(a.end(), {"--workers", "2", "--worker-id", "proc-a"});
        b.insert(b.end(), {"--workers", "2", "--worker-id", "proc-b"});
        const pid_t pa = spawn(a), pb = spawn(b);
        CHECK(wait_exit(pa) == kExitOk);
        CHECK(wait_exit(pb) == kExitOk);
        auto store = ResultStore::open(target.dsn);
        const auto s = find_study("hypothesis");
        for (const auto& c : cartesian_product(s.space)) {
            const auto n = store.count_results(s.schema, c);
            CHECK(n >= 5);
            CHECK(n <= 5 + 3);
        }
        const auto rows = store.read_results(s.schema);
        std::set<std::pair<std::string, std::uint64_t>> keys;
        for (const auto& r : rows) keys.emplace(r.meta.worker_id, r.meta.seed);
        CHECK(keys.size() == rows.size());
        std::set<std::string> workers;
        for (const auto& r : rows) workers.insert(r.meta.worker_id.substr(0, 6));
        CHECK(workers == std::set<std::string>{"proc-a", "proc-b"});
        store.purge(s.schema);
    }
}

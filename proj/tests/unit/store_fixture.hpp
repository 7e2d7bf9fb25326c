#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "simstudy/storage.hpp"
#include "test_support.hpp"

namespace simstudy::testing {

struct StoreTarget {
    std::string backend;
    std::string dsn;
};

/// A fresh SQLite file, plus the shared throwaway PostgreSQL server when
/// server binaries are available.
inline std::vector<StoreTarget> store_targets() {
    static TempDir dir;
    static std::atomic<int> counter{0};
    std::vector<StoreTarget> targets{{"sqlite", dir.file("store" + std::to_string(counter++) + ".db")}};
    if (TempPgServer::available()) {
        static std::unique_ptr<TempPgServer> server = std::make_unique<TempPgServer>();
        targets.push_back({"postgres", server->dsn()});
    }
    return targets;
}

/// Unique table name so tests sharing a server do not collide.
inline std::string unique_table(const std::string& stem) {
    static std::atomic<int> counter{0};
    return stem + "_" + std::to_string(counter++);
}

}  // namespace simstudy::testing

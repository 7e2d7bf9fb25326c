#pragma once

#include <filesystem>
#include <string>

namespace simstudy::testing {

/// Directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Throwaway PostgreSQL cluster on a free local port. Runs the server as
/// "nobody" when the test process is root, since postgres refuses root.
class TempPgServer {
public:
    /// True when server binaries were found at configure time.
    static bool available();

    TempPgServer();
    ~TempPgServer();
    TempPgServer(const TempPgServer&) = delete;
    TempPgServer& operator=(const TempPgServer&) = delete;

    std::string dsn() const;
    int port() const noexcept { return port_; }

    void start();
    /// Fast shutdown; connected clients are dropped.
    void stop();
    bool running() const noexcept { return running_; }

private:
    std::string run_as_owner(const std::string& command) const;

    std::filesystem::path dir_;
    int port_ = 0;
    bool running_ = false;
};

/// Unused TCP port on 127.0.0.1.
int free_port();

}  // namespace simstudy::testing

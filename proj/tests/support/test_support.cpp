#include "test_support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <pwd.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <stdexcept>

namespace simstudy::testing {

namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& prefix) {
    std::string templ = (fs::temp_directory_path() / (prefix + "XXXXXX")).string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
    return templ;
}

void run(const std::string& command) {
    if (std::system(command.c_str()) != 0) throw std::runtime_error("command failed: " + command);
}

}  // namespace

TempDir::TempDir() : path_(make_temp_dir("simstudy-test-")) {}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

int free_port() {
    const int fd = socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    socklen_t len = sizeof addr;
    if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        close(fd);
        throw std::runtime_error("cannot find a free port");
    }
    close(fd);
    return ntohs(addr.sin_port);
}

bool TempPgServer::available() {
    const std::string bin = SIMSTUDY_TEST_PG_BIN;
    return !bin.empty() && fs::exists(fs::path(bin) / "pg_ctl") && fs::exists(fs::path(bin) / "initdb");
}

std::string TempPgServer::run_as_owner(const std::string& command) const {
    if (geteuid() != 0) return command;
    return "setpriv --reuid=nobody --regid=nogroup --clear-groups " + command;
}

TempPgServer::TempPgServer() : dir_(make_temp_dir("simstudy-pg-")), port_(free_port()) {
    if (!available()) throw std::runtime_error("no PostgreSQL server binaries");
    if (geteuid() == 0) {
        const passwd* pw = getpwnam("nobody");
        if (!pw || chown(dir_.c_str(), pw->pw_uid, pw->pw_gid) != 0)
            throw std::runtime_error("cannot hand the cluster directory to nobody");
    }
    const std::string bin = SIMSTUDY_TEST_PG_BIN;
    run(run_as_owner(bin + "/initdb -D " + (dir_ / "data").string() + " -U postgres --auth=trust -E UTF8") +
        " > " + (dir_ / "initdb.log").string() + " 2>&1");
    start();
}

TempPgServer::~TempPgServer() {
    try {
        stop();
    } catch (...) {
    }
    std::error_code ec;
    fs::remove_all(dir_, ec);
}

std::string TempPgServer::dsn() const {
    return "postgresql://postgres@127.0.0.1:" + std::to_string(port_) + "/postgres?connect_timeout=5";
}

void TempPgServer::start() {
    if (running_) return;
    const std::string bin = SIMSTUDY_TEST_PG_BIN;
    const std::string opts = "-p " + std::to_string(port_) + " -k " + dir_.string() +
                             " -h 127.0.0.1 -c fsync=off -c max_connections=50";
    run(run_as_owner(bin + "/pg_ctl -D " + (dir_ / "data").string() + " -l " + (dir_ / "server.log").string() +
                     " -o \"" + opts + "\" -w -t 60 start") +
        " > /dev/null 2>&1");
    running_ = true;
}

void TempPgServer::stop() {
    if (!running_) return;
    const std::string bin = SIMSTUDY_TEST_PG_BIN;
    run(run_as_owner(bin + "/pg_ctl -D " + (dir_ / "data").string() + " -m fast -w -t 60 stop") + " > /dev/null 2>&1");
    running_ = false;
}

}  // namespace simstudy::testing

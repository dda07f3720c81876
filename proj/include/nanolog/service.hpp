#pragma once

#include "nanolog/error.hpp"
#include "nanolog/workspace_store.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace nanolog {

struct ServiceConfig {
    std::filesystem::path data_dir = "data";
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::optional<std::filesystem::path> seed_corpus;
    std::optional<std::filesystem::path> ui_dir;
    std::string cors_origin;  // empty: no CORS headers

    std::chrono::milliseconds query_timeout{2000};
    std::chrono::seconds session_ttl{std::chrono::hours(24)};
    unsigned worker_cap = 0;  // 0: number of processors

    std::size_t max_depth_cap = 512;
    std::size_t max_solutions_cap = 50;
    std::size_t max_body_bytes = 64 * 1024;

    std::ostream* log = nullptr;  // one JSON line per request when set
};

/// Wire-level error: HTTP status plus a stable machine code.
struct ApiError {
    int status;
    std::string code;
    std::string message;
    std::optional<SourcePosition> position;
};

ApiError to_api_error(const Error& e);

struct HttpResult {
    int status = 200;
    std::string body;  // JSON; empty for 204
};

/// JSON-over-HTTP front end for workspaces, queries and interactive proofs.
///
/// Durable state lives in the WorkspaceStore; proof sessions are held in
/// memory only and expire after `session_ttl` without use.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Transport-independent request dispatch.
    HttpResult handle(std::string_view method, std::string_view path, std::string_view body);

    /// Binds the listening socket; returns the bound port. Throws Error(Io)
    /// when the address is unavailable.
    int bind();
    /// Serves until stop(). Requires bind().
    void run();
    void stop();
    void wait_until_ready() const;

    WorkspaceStore& store();
    std::size_t session_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace nanolog

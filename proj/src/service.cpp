#include "nanolog/service.hpp"

#include "nanolog/json_codec.hpp"
#include "nanolog/parser.hpp"
#include "nanolog/proof.hpp"
#include "nanolog/solver.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <semaphore>
#include <thread>
#include <vector>

namespace nanolog {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

ApiError to_api_error(const Error& e) {
    auto make = [&](int status, const char* code) {
        return ApiError{status, code, e.what(), e.position()};
    };
    switch (e.kind()) {
        case ErrorKind::ParseError: return make(422, "parse_error");
        case ErrorKind::BareVariableHead: return make(422, "bare_variable_head");
        case ErrorKind::BudgetExhausted: return make(422, "budget_exhausted");
        case ErrorKind::InvalidVariable: return make(422, "invalid_variable");
        case ErrorKind::NodeNotOpen: return make(409, "node_not_open");
        case ErrorKind::UnificationFailed: return make(409, "unification_failed");
        case ErrorKind::BadPath: return make(422, "bad_path");
        case ErrorKind::EmptyHistory: return make(409, "empty_history");
        case ErrorKind::ReplayMismatch: return make(500, "replay_mismatch");
        case ErrorKind::InvalidId: return make(422, "invalid_id");
        case ErrorKind::AlreadyExists: return make(409, "already_exists");
        case ErrorKind::NotFound: return make(404, "not_found");
        case ErrorKind::BadIndex: return make(404, "bad_index");
        case ErrorKind::Io: return make(500, "io_error");
    }
    return make(500, "internal_error");
}

namespace {

// Service-level failure that has no library counterpart (malformed JSON,
// unknown route, ...).
struct RequestError {
    int status;
    std::string code;
    std::string message;
};

json error_body(const std::string& code, const std::string& message,
                const std::optional<SourcePosition>& pos = std::nullopt) {
    json err = {{"code", code}, {"message", message}};
    if (pos) err["position"] = {{"line", pos->line}, {"column", pos->column}};
    return {{"error", std::move(err)}};
}

HttpResult respond(int status, const json& body) { return {status, body.dump()}; }

HttpResult respond_error(const ApiError& e, json extra = json::object()) {
    json body = error_body(e.code, e.message, e.position);
    for (auto& [k, v] : extra.items()) body[k] = v;
    return respond(e.status, body);
}

json parse_body(std::string_view body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw RequestError{400, "invalid_request", "request body must be a JSON object"};
    }
    return j;
}

std::string require_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw RequestError{400, "invalid_request", std::string("missing string field '") + key + "'"};
    }
    return it->get<std::string>();
}

std::size_t require_index(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer() || it->get<long long>() < 0) {
        throw RequestError{400, "invalid_request",
                           std::string("field '") + key + "' must be a non-negative integer"};
    }
    return it->get<std::size_t>();
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
        auto slash = path.find('/');
        auto part = path.substr(0, slash);
        if (!part.empty()) parts.push_back(part);
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return parts;
}

std::optional<std::size_t> parse_index(std::string_view text) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

struct ProofSession {
    ProofSession(std::string ws, ProofState st)
        : workspace(std::move(ws)), state(std::move(st)), last_used(Clock::now()) {}

    std::mutex mutex;
    std::string workspace;
    ProofState state;
    Clock::time_point last_used;
};

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    WorkspaceStore store;
    std::counting_semaphore<1024> workers;

    mutable std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<ProofSession>, std::less<>> sessions;
    std::mt19937_64 rng{std::random_device{}()};

    std::mutex log_mutex;
    httplib::Server server;
    int bound_port = -1;

    explicit Impl(ServiceConfig c)
        : config(std::move(c)),
          store(config.data_dir, config.seed_corpus),
          workers(static_cast<std::ptrdiff_t>(std::clamp<unsigned>(
              config.worker_cap ? config.worker_cap : std::max(1U, std::thread::hardware_concurrency()),
              1U, 1024U))) {}

    // ---- sessions --------------------------------------------------------

    void purge_expired_locked(Clock::time_point now) {
        for (auto it = sessions.begin(); it != sessions.end();) {
            if (now - it->second->last_used > config.session_ttl) {
                it = sessions.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::string fresh_session_id() {
        static constexpr char hex[] = "0123456789abcdef";
        std::string id;
        for (int word = 0; word < 2; ++word) {
            std::uint64_t bits = rng();
            for (int i = 0; i < 16; ++i, bits >>= 4) id += hex[bits & 0xF];
        }
        return id;
    }

    std::shared_ptr<ProofSession> session(std::string_view pid) {
        std::lock_guard guard(sessions_mutex);
        const auto now = Clock::now();
        purge_expired_locked(now);
        auto it = sessions.find(pid);
        if (it == sessions.end()) {
            throw Error(ErrorKind::NotFound, "no proof session '" + std::string(pid) + "'");
        }
        it->second->last_used = now;
        return it->second;
    }

    // ---- workspaces --------------------------------------------------------

    HttpResult create_workspace(std::string_view body) {
        json req = parse_body(body);
        std::string id = require_string(req, "id");
        bool seed = req.value("seed", false);
        store.create_workspace(id, seed);
        return respond(201, {{"id", id}, {"rules", rules_json(id)}});
    }

    json rules_json(const std::string& id) {
        json out = json::array();
        for (const ListedRule& r : store.list_rules(id)) out.push_back({{"index", r.index}, {"text", r.text}});
        return out;
    }

    HttpResult add_rule(const std::string& id, std::string_view body) {
        json req = parse_body(body);
        ListedRule r = store.add_rule(id, require_string(req, "text"));
        return respond(201, {{"index", r.index}, {"text", r.text}});
    }

    HttpResult delete_rule(const std::string& id, std::string_view index_text) {
        auto index = parse_index(index_text);
        if (!store.exists(id)) throw Error(ErrorKind::NotFound, "no workspace '" + id + "'");
        if (!index) throw Error(ErrorKind::BadIndex, "bad rule index '" + std::string(index_text) + "'");
        store.delete_rule(id, *index);
        return {204, {}};
    }

    SolveOptions query_options(const json& req) {
        SolveOptions opts;
        opts.max_depth = std::min(opts.max_depth, config.max_depth_cap);
        opts.max_solutions = std::min(opts.max_solutions, config.max_solutions_cap);
        auto it = req.find("options");
        if (it == req.end() || it->is_null()) return opts;
        if (!it->is_object()) throw RequestError{400, "invalid_request", "'options' must be an object"};
        const json& o = *it;
        if (o.contains("strategy")) {
            auto s = o["strategy"].is_string() ? parse_strategy(o["strategy"].get<std::string>())
                                               : std::nullopt;
            if (!s) throw RequestError{400, "invalid_request", "strategy must be dfs, bfs or iddfs"};
            opts.strategy = *s;
        }
        auto count = [&](const char* key, std::size_t cap, std::size_t& out) {
            if (!o.contains(key)) return;
            const json& v = o[key];
            if (!v.is_number_integer() || v.get<long long>() < 1) {
                throw RequestError{400, "invalid_request",
                                   std::string("'") + key + "' must be a positive integer"};
            }
            out = std::min(v.get<std::size_t>(), cap);
        };
        count("max_depth", config.max_depth_cap, opts.max_depth);
        count("max_solutions", config.max_solutions_cap, opts.max_solutions);
        return opts;
    }

    HttpResult query(const std::string& id, std::string_view body) {
        const auto deadline = Clock::now() + config.query_timeout;
        json req = parse_body(body);
        Program program = store.program(id);
        std::vector<Term> goals = parse_query(require_string(req, "goals"));
        SolveOptions opts = query_options(req);
        opts.deadline = deadline;

        if (!workers.try_acquire_until(deadline)) {
            SolveOutcome busy;
            busy.budget_hit = BudgetKind::Time;
            return respond(200, query_response(busy));
        }
        SolveOutcome outcome;
        try {
            outcome = solve(program, goals, opts);
        } catch (...) {
            workers.release();
            throw;
        }
        workers.release();
        return respond(200, query_response(outcome));
    }

    // ---- proofs ------------------------------------------------------------

    HttpResult create_proof(std::string_view body) {
        json req = parse_body(body);
        std::string ws = require_string(req, "workspace");
        if (!store.exists(ws)) throw Error(ErrorKind::NotFound, "no workspace '" + ws + "'");
        std::vector<Term> goals = parse_query(require_string(req, "goal"));
        if (goals.size() != 1) {
            throw RequestError{400, "invalid_request", "a proof starts from exactly one goal"};
        }
        auto s = std::make_shared<ProofSession>(ws, new_proof(goals.front()));
        std::string pid;
        {
            std::lock_guard guard(sessions_mutex);
            purge_expired_locked(Clock::now());
            do {
                pid = fresh_session_id();
            } while (sessions.contains(pid));
            sessions.emplace(pid, s);
        }
        json out = proof_json(s->state);
        out["proof_id"] = pid;
        out["workspace"] = ws;
        return respond(201, out);
    }

    template <class Op>
    HttpResult proof_op(std::string_view pid, Op&& op) {
        auto s = session(pid);
        std::lock_guard guard(s->mutex);
        try {
            s->state = op(*s);
        } catch (const Error& e) {
            return respond_error(to_api_error(e), {{"proof", proof_json(s->state)}});
        }
        json out = proof_json(s->state);
        out["proof_id"] = std::string(pid);
        out["workspace"] = s->workspace;
        return respond(200, out);
    }

    HttpResult get_proof(std::string_view pid) {
        auto s = session(pid);
        std::lock_guard guard(s->mutex);
        json out = proof_json(s->state);
        out["proof_id"] = std::string(pid);
        out["workspace"] = s->workspace;
        return respond(200, out);
    }

    HttpResult apply(std::string_view pid, std::string_view body) {
        json req = parse_body(body);
        auto it = req.find("path");
        if (it == req.end() || !it->is_array()) {
            throw RequestError{400, "invalid_request", "'path' must be an array of child indices"};
        }
        NodePath path;
        for (const json& step : *it) {
            if (!step.is_number_integer() || step.get<long long>() < 0) {
                throw RequestError{400, "invalid_request", "'path' entries must be non-negative integers"};
            }
            path.push_back(step.get<std::size_t>());
        }
        const std::size_t rule_index = require_index(req, "rule_index");
        return proof_op(pid, [&](ProofSession& s) {
            Program program = store.program(s.workspace);
            if (rule_index >= program.size()) {
                throw Error(ErrorKind::BadIndex, "rule index " + std::to_string(rule_index) +
                                                     " out of range (" +
                                                     std::to_string(program.size()) + " rules)");
            }
            return apply_rule(s.state, path, program[rule_index]);
        });
    }

    HttpResult substitute(std::string_view pid, std::string_view body) {
        json req = parse_body(body);
        std::string var = require_string(req, "var");
        std::string term_text = require_string(req, "term");
        return proof_op(pid, [&](ProofSession& s) {
            return apply_manual_subst(s.state, var, parse_term(term_text));
        });
    }

    HttpResult undo_op(std::string_view pid) {
        return proof_op(pid, [](ProofSession& s) { return undo(s.state); });
    }

    // ---- routing -----------------------------------------------------------

    HttpResult route(std::string_view method, std::string_view path, std::string_view body) {
        auto parts = split_path(path);
        auto is = [&](std::string_view m) { return method == m; };
        auto not_allowed = [] {
            return RequestError{405, "method_not_allowed", "method not allowed on this resource"};
        };
        if (parts.size() < 2 || parts[0] != "api") {
            throw RequestError{404, "no_route", "no such endpoint"};
        }
        if (parts[1] == "workspaces") {
            if (parts.size() == 2) {
                if (!is("POST")) throw not_allowed();
                return create_workspace(body);
            }
            const std::string id(parts[2]);
            if (parts.size() == 4 && parts[3] == "rules") {
                if (is("GET")) return respond(200, rules_json(id));
                if (is("POST")) return add_rule(id, body);
                throw not_allowed();
            }
            if (parts.size() == 5 && parts[3] == "rules") {
                if (!is("DELETE")) throw not_allowed();
                return delete_rule(id, parts[4]);
            }
            if (parts.size() == 4 && parts[3] == "query") {
                if (!is("POST")) throw not_allowed();
                return query(id, body);
            }
        } else if (parts[1] == "proofs") {
            if (parts.size() == 2) {
                if (!is("POST")) throw not_allowed();
                return create_proof(body);
            }
            if (parts.size() == 3) {
                if (!is("GET")) throw not_allowed();
                return get_proof(parts[2]);
            }
            if (parts.size() == 4) {
                if (!is("POST")) throw not_allowed();
                if (parts[3] == "apply") return apply(parts[2], body);
                if (parts[3] == "substitute") return substitute(parts[2], body);
                if (parts[3] == "undo") return undo_op(parts[2]);
            }
        }
        throw RequestError{404, "no_route", "no such endpoint"};
    }

    HttpResult handle(std::string_view method, std::string_view path, std::string_view body) {
        if (body.size() > config.max_body_bytes) {
            return respond(413, error_body("payload_too_large", "request body exceeds limit"));
        }
        try {
            return route(method, path, body);
        } catch (const Error& e) {
            return respond_error(to_api_error(e));
        } catch (const RequestError& e) {
            return respond(e.status, error_body(e.code, e.message));
        } catch (const std::exception& e) {
            return respond(500, error_body("internal_error", e.what()));
        }
    }

    void log_request(const httplib::Request& req, int status, Clock::duration took) {
        if (config.log == nullptr) return;
        json line = {
            {"method", req.method},
            {"path", req.path},
            {"status", status},
            {"ms", std::chrono::duration<double, std::milli>(took).count()},
            {"remote", req.remote_addr},
        };
        std::lock_guard guard(log_mutex);
        *config.log << line.dump() << '\n' << std::flush;
    }

    void add_cors(httplib::Response& res) const {
        if (config.cors_origin.empty()) return;
        res.set_header("Access-Control-Allow-Origin", config.cors_origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }

    void install_routes() {
        // httplib also sets SO_REUSEPORT, which would let a second server
        // share a busy port instead of failing to bind.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
        });
        server.set_payload_max_length(config.max_body_bytes);
        if (config.ui_dir) server.set_mount_point("/", config.ui_dir->string());

        auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
            const auto start = Clock::now();
            HttpResult r = handle(req.method, req.path, req.body);
            res.status = r.status;
            if (!r.body.empty()) res.set_content(r.body, "application/json; charset=utf-8");
            add_cors(res);
            log_request(req, r.status, Clock::now() - start);
        };
        const char* any = R"(/api/.*)";
        server.Get(any, dispatch);
        server.Post(any, dispatch);
        server.Delete(any, dispatch);
        server.Options(any, [this](const httplib::Request&, httplib::Response& res) {
            res.status = 204;
            add_cors(res);
        });
        server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            const char* code = res.status == 413 ? "payload_too_large"
                               : res.status == 404 ? "no_route"
                                                   : "http_error";
            res.set_content(error_body(code, httplib::status_message(res.status)).dump(),
                            "application/json; charset=utf-8");
            add_cors(res);
            return httplib::Server::HandlerResponse::Handled;
        });
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
    impl_->install_routes();
}

Service::~Service() { stop(); }

HttpResult Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    return impl_->handle(method, path, body);
}

int Service::bind() {
    auto& s = impl_->server;
    const auto& c = impl_->config;
    if (c.port == 0) {
        impl_->bound_port = s.bind_to_any_port(c.host);
    } else {
        impl_->bound_port = s.bind_to_port(c.host, c.port) ? c.port : -1;
    }
    if (impl_->bound_port < 0) {
        throw Error(ErrorKind::Io, "cannot bind " + c.host + ":" + std::to_string(c.port));
    }
    return impl_->bound_port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

WorkspaceStore& Service::store() { return impl_->store; }

std::size_t Service::session_count() const {
    std::lock_guard guard(impl_->sessions_mutex);
    return impl_->sessions.size();
}

}  // namespace nanolog

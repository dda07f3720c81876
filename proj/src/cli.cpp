#include "nanolog/cli.hpp"

#include "nanolog/error.hpp"
#include "nanolog/json_codec.hpp"
#include "nanolog/parser.hpp"
#include "nanolog/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nanolog {

namespace {

int solve_command(const std::string& file, const std::string& query_text, const SolveOptions& opts,
                  bool trace, bool as_json, std::ostream& out, std::ostream& err) {
    Program program;
    std::vector<Term> goals;
    try {
        program = load_program_file(file);
        goals = parse_query(query_text);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    SolveOutcome outcome = solve(program, goals, opts);
    const int code = outcome.solutions.empty() ? 1 : 0;
    if (as_json) {
        out << query_response(outcome).dump();
        return code;
    }

    for (std::size_t i = 0; i < outcome.solutions.size(); ++i) {
        const Solution& s = outcome.solutions[i];
        if (i > 0) out << ";\n";
        out << format_bindings(s);
        if (s.cyclic) out << "% cyclic binding: substitution budget exhausted\n";
        if (trace) out << format_trace(s.trace);
    }
    if (outcome.solutions.empty()) out << "no solutions.\n";
    if (outcome.exhausted) {
        out << "exhausted.\n";
    } else if (outcome.budget_hit) {
        out << "stopped: " << to_string(*outcome.budget_hit) << " budget reached.\n";
    }
    return code;
}

Service* running_service = nullptr;

extern "C" void on_signal(int) {
    if (running_service != nullptr) running_service->stop();
}

int serve_command(const ServiceConfig& config, std::ostream& out, std::ostream& err) {
    try {
        Service service(config);
        int port = service.bind();
        out << "nanolog: serving on http://" << config.host << ':' << port << " (data: "
            << config.data_dir.string() << ")\n"
            << std::flush;
        running_service = &service;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        service.run();
        running_service = nullptr;
        return 0;
    } catch (const Error& e) {
        running_service = nullptr;
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

bool split_addr(const std::string& addr, std::string& host, int& port) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) return false;
    host = addr.substr(0, colon);
    try {
        std::size_t used = 0;
        port = std::stoi(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1 || port < 0 || port > 65535) return false;
    } catch (const std::exception&) {
        return false;
    }
    return !host.empty();
}

void add_search_flags(CLI::App* cmd, SolveOptions& opts, std::string& strategy) {
    cmd->add_option("--strategy", strategy, "Search strategy")
        ->check(CLI::IsMember({"dfs", "bfs", "iddfs"}));
    cmd->add_option("--max-depth", opts.max_depth, "Rule applications per path")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-solutions", opts.max_solutions, "Stop after this many solutions")
        ->check(CLI::PositiveNumber);
}

}  // namespace

Program load_program_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_program(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ":" + e.what(), e.position());
    }
}

std::string format_bindings(const Solution& s) {
    if (s.bindings.empty()) return "true\n";
    std::string out;
    for (const auto& [name, value] : s.bindings) {
        out += name + " = " + print_term(value) + "\n";
    }
    return out;
}

std::string format_trace(const Trace& trace) {
    std::string out = "trace:\n";
    for (const TraceEntry& e : trace) {
        out += std::string(2 * (e.depth + 1), ' ') + print_term(e.goal) + "  <-  " +
               print_rule(e.rule) + "\n";
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"NanoProlog interpreter, proof service and REPL", "nanolog"};
    app.require_subcommand(1);

    std::string file;
    std::string query;
    std::string strategy = "dfs";
    bool trace = false;
    bool as_json = false;
    SolveOptions opts;

    auto* solve_cmd = app.add_subcommand("solve", "Run one query against a program file");
    solve_cmd->add_option("--file", file, "Program file")->required();
    solve_cmd->add_option("--query", query, "Query, e.g. 'grandparent(alice,Q)'")->required();
    add_search_flags(solve_cmd, opts, strategy);
    solve_cmd->add_flag("--trace", trace, "Print the applied rules of every solution");
    solve_cmd->add_flag("--json", as_json, "Emit the service's query response JSON");

    std::string repl_file;
    auto* repl_cmd = app.add_subcommand("repl", "Interactive top level");
    repl_cmd->add_option("--file", repl_file, "Program file to load");
    add_search_flags(repl_cmd, opts, strategy);

    ServiceConfig config;
    config.log = &out;
    std::string addr = "127.0.0.1:8080";
    std::string seed;
    std::string ui_dir;
    long long timeout_ms = config.query_timeout.count();
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--addr", addr, "host:port to listen on")->capture_default_str();
    serve_cmd->add_option("--data-dir", config.data_dir, "Workspace directory")
        ->capture_default_str()
        ->envname("NANOLOG_DATA_DIR");
    serve_cmd->add_option("--seed-corpus", seed, "Program file for seeded workspaces")
        ->envname("NANOLOG_SEED_CORPUS");
    serve_cmd->add_option("--ui-dir", ui_dir, "Static UI assets to serve at /");
    serve_cmd->add_option("--cors-origin", config.cors_origin, "Allowed CORS origin")
        ->envname("NANOLOG_CORS_ORIGIN");
    serve_cmd->add_option("--query-timeout-ms", timeout_ms, "Wall-clock limit per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    serve_cmd->add_option("--workers", config.worker_cap, "Concurrent solver runs (0: cpus)");
    long long ttl_s = config.session_ttl.count();
    serve_cmd->add_option("--session-ttl-s", ttl_s, "Idle proof session lifetime")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bool quiet = false;
    serve_cmd->add_flag("--quiet", quiet, "Disable request logging");

    std::vector<const char*> argv{"nanolog"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    opts.strategy = *parse_strategy(strategy);

    if (*solve_cmd) return solve_command(file, query, opts, trace, as_json, out, err);

    if (*repl_cmd) {
        Program program;
        if (!repl_file.empty()) {
            try {
                program = load_program_file(repl_file);
            } catch (const Error& e) {
                err << "error: " << e.what() << '\n';
                return 2;
            }
        }
        return Repl(std::move(program), in, out, opts).run();
    }

    if (!split_addr(addr, config.host, config.port)) {
        err << "error: --addr must be host:port, got '" << addr << "'\n";
        return 2;
    }
    if (!seed.empty()) config.seed_corpus = seed;
    if (!ui_dir.empty()) config.ui_dir = ui_dir;
    config.query_timeout = std::chrono::milliseconds(timeout_ms);
    config.session_ttl = std::chrono::seconds(ttl_s);
    if (quiet) config.log = nullptr;
    return serve_command(config, out, err);
}

}  // namespace nanolog

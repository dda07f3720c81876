#pragma once

#include "nanolog/solver.hpp"
#include "nanolog/term.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nanolog {

/// Entry point of the `nanolog` tool; `args` excludes the program name.
/// Exit codes: 0 solutions found / success, 1 no solutions, 2 usage, parse
/// or startup error.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

/// Reads and parses a program file. Errors carry the path in the message.
Program load_program_file(const std::string& path);

/// `Var = term` lines, or `true` when the query has no variables.
std::string format_bindings(const Solution& s);

/// Applied rules in order, indented by proof depth.
std::string format_trace(const Trace& trace);

/// Interactive top level: reads queries, prints one solution at a time,
/// `;` asks for the next one. Meta-commands: `:load <file>`, `:rules`,
/// `:quit`. Never exits on malformed input.
class Repl {
public:
    Repl(Program program, std::istream& in, std::ostream& out, SolveOptions opts = {});

    /// Runs until `:quit` or end of input. Returns 0.
    int run();

    const Program& program() const noexcept { return program_; }

private:
    void run_query(const std::string& text);
    bool meta_command(const std::string& line);

    Program program_;
    std::istream& in_;
    std::ostream& out_;
    SolveOptions opts_;
    bool quit_ = false;
};

}  // namespace nanolog

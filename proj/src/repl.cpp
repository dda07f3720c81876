#include "nanolog/cli.hpp"

#include "nanolog/error.hpp"
#include "nanolog/parser.hpp"

#include <istream>
#include <ostream>

namespace nanolog {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Repl::Repl(Program program, std::istream& in, std::ostream& out, SolveOptions opts)
    : program_(std::move(program)), in_(in), out_(out), opts_(opts) {}

int Repl::run() {
    std::string line;
    while (!quit_) {
        out_ << "?- " << std::flush;
        if (!std::getline(in_, line)) {
            out_ << '\n';
            break;
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == ':') {
            meta_command(line);
        } else {
            run_query(line);
        }
    }
    return 0;
}

bool Repl::meta_command(const std::string& line) {
    auto space = line.find(' ');
    const std::string cmd = line.substr(0, space);
    const std::string arg = space == std::string::npos ? "" : trim(line.substr(space + 1));
    if (cmd == ":quit") {
        quit_ = true;
    } else if (cmd == ":rules") {
        out_ << print_program(program_);
    } else if (cmd == ":load") {
        if (arg.empty()) {
            out_ << "error: usage :load <file>\n";
            return false;
        }
        try {
            program_ = load_program_file(arg);
            out_ << "% loaded " << program_.size() << " rules from " << arg << '\n';
        } catch (const Error& e) {
            out_ << "error: " << e.what() << '\n';
            return false;
        }
    } else {
        out_ << "error: unknown command " << cmd << " (try :load, :rules, :quit)\n";
        return false;
    }
    return true;
}

void Repl::run_query(const std::string& text) {
    std::vector<Term> goals;
    try {
        goals = parse_query(text);
    } catch (const Error& e) {
        out_ << "error: " << e.what() << '\n';
        return;
    }

    SolutionStream stream(program_, std::move(goals), opts_);
    auto report_stop = [&] {
        if (auto b = stream.budget_hit(); b && *b != BudgetKind::MaxSolutions) {
            out_ << "% search stopped: " << to_string(*b) << " budget reached\n";
        }
    };

    std::optional<Solution> sol = stream.next();
    while (sol) {
        out_ << format_bindings(*sol);
        if (sol->cyclic) out_ << "% cyclic binding: substitution budget exhausted\n";
        if (stream.finished()) {
            report_stop();
            out_ << ".\n";
            return;
        }
        std::string reply;
        if (!std::getline(in_, reply)) {
            quit_ = true;
            return;
        }
        if (trim(reply) != ";") {
            out_ << ".\n";
            return;
        }
        sol = stream.next();
    }
    report_stop();
    out_ << "false.\n";
}

}  // namespace nanolog

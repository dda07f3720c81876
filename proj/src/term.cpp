#include "nanolog/term.hpp"

#include "nanolog/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace nanolog {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError: return "parse error";
        case ErrorKind::BareVariableHead: return "bare variable head";
        case ErrorKind::BudgetExhausted: return "budget exhausted";
        case ErrorKind::InvalidVariable: return "invalid variable";
        case ErrorKind::NodeNotOpen: return "node not open";
        case ErrorKind::UnificationFailed: return "unification failed";
        case ErrorKind::BadPath: return "bad path";
        case ErrorKind::EmptyHistory: return "empty history";
        case ErrorKind::ReplayMismatch: return "replay mismatch";
        case ErrorKind::InvalidId: return "invalid id";
        case ErrorKind::AlreadyExists: return "already exists";
        case ErrorKind::NotFound: return "not found";
        case ErrorKind::BadIndex: return "bad index";
        case ErrorKind::Io: return "i/o error";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Term

Term Term::variable(std::string name) {
    return Term(std::make_shared<const Node>(Node{true, std::move(name), {}}));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    return Term(std::make_shared<const Node>(Node{false, std::move(functor), std::move(args)}));
}

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->is_var != b.node_->is_var || a.node_->name != b.node_->name) return false;
    return std::ranges::equal(a.node_->args, b.node_->args);
}

bool operator<(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return false;
    if (a.node_->is_var != b.node_->is_var) return a.node_->is_var;
    if (a.node_->name != b.node_->name) return a.node_->name < b.node_->name;
    return std::lexicographical_compare(a.node_->args.begin(), a.node_->args.end(),
                                        b.node_->args.begin(), b.node_->args.end());
}

Rule::Rule(Term conclusion_, std::vector<Term> premises_)
    : conclusion(std::move(conclusion_)), premises(std::move(premises_)) {
    if (conclusion.is_variable()) {
        throw Error(ErrorKind::BareVariableHead,
                    "rule conclusion must not be a variable: " + conclusion.name());
    }
}

// ---------------------------------------------------------------------------
// Env

Env Env::bind(const std::string& name, Term value) const {
    if (value.is_variable() && value.name() == name) {
        throw std::invalid_argument("self-binding of variable " + name);
    }
    Env out = *this;
    out.bindings_.insert_or_assign(name, std::move(value));
    return out;
}

const Term* Env::lookup(std::string_view name) const {
    auto it = bindings_.find(name);
    return it == bindings_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

Term subst_impl(const Env& env, const Term& t, std::size_t depth, std::size_t budget) {
    if (t.is_variable()) {
        const Term* bound = env.lookup(t.name());
        if (bound == nullptr) return t;
        if (depth >= budget) throw BudgetExhausted(budget);
        return subst_impl(env, *bound, depth + 1, budget);
    }
    if (t.arity() == 0) return t;

    std::vector<Term> args;
    args.reserve(t.arity());
    bool changed = false;
    for (const Term& a : t.args()) {
        args.push_back(subst_impl(env, a, depth, budget));
        changed = changed || !args.back().same_node(a);
    }
    return changed ? Term::compound(t.name(), std::move(args)) : t;
}

Term rename_term(const Term& t, const std::string& suffix) {
    if (t.is_variable()) return Term::variable(t.name() + suffix);
    if (t.arity() == 0) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) args.push_back(rename_term(a, suffix));
    return Term::compound(t.name(), std::move(args));
}

void collect_vars(const Term& t, std::vector<std::string>& out,
                  std::unordered_set<std::string>& seen) {
    if (t.is_variable()) {
        if (seen.insert(t.name()).second) out.push_back(t.name());
        return;
    }
    for (const Term& a : t.args()) collect_vars(a, out, seen);
}

bool is_ident_tail(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

void print_into(const Term& t, std::string& out) {
    out += t.name();
    if (t.is_variable() || t.arity() == 0) return;
    out += '(';
    bool first = true;
    for (const Term& a : t.args()) {
        if (!first) out += ',';
        first = false;
        print_into(a, out);
    }
    out += ')';
}

}  // namespace

Term apply_subst(const Env& env, const Term& t, std::size_t depth_budget) {
    if (env.empty()) return t;
    return subst_impl(env, t, 0, depth_budget);
}

std::vector<Term> apply_subst(const Env& env, std::span<const Term> ts, std::size_t depth_budget) {
    std::vector<Term> out;
    out.reserve(ts.size());
    for (const Term& t : ts) out.push_back(apply_subst(env, t, depth_budget));
    return out;
}

Rule apply_subst(const Env& env, const Rule& r, std::size_t depth_budget) {
    return Rule(apply_subst(env, r.conclusion, depth_budget),
                apply_subst(env, std::span<const Term>(r.premises), depth_budget));
}

Rule rename_rule(const Rule& r, std::size_t instance_id) {
    const std::string suffix = rename_separator + std::to_string(instance_id);
    std::vector<Term> premises;
    premises.reserve(r.premises.size());
    for (const Term& p : r.premises) premises.push_back(rename_term(p, suffix));
    return Rule(rename_term(r.conclusion, suffix), std::move(premises));
}

std::string_view base_variable_name(std::string_view name) {
    auto dot = name.rfind(rename_separator);
    if (dot == std::string_view::npos || dot + 1 == name.size()) return name;
    auto tail = name.substr(dot + 1);
    if (!std::ranges::all_of(tail, [](char c) { return c >= '0' && c <= '9'; })) return name;
    return name.substr(0, dot);
}

std::vector<std::string> term_vars(const Term& t) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    collect_vars(t, out, seen);
    return out;
}

std::vector<std::string> term_vars(std::span<const Term> ts) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const Term& t : ts) collect_vars(t, out, seen);
    return out;
}

std::vector<std::string> term_vars(const Rule& r) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    collect_vars(r.conclusion, out, seen);
    for (const Term& p : r.premises) collect_vars(p, out, seen);
    return out;
}

bool is_valid_variable_name(std::string_view name, bool allow_renamed) {
    if (allow_renamed) name = base_variable_name(name);
    if (name.empty() || name[0] < 'A' || name[0] > 'Z') return false;
    return std::all_of(name.begin() + 1, name.end(), is_ident_tail);
}

bool is_valid_functor_name(std::string_view name) {
    if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
    return std::all_of(name.begin() + 1, name.end(), is_ident_tail);
}

// ---------------------------------------------------------------------------
// Printing

std::string print_term(const Term& t) {
    std::string out;
    print_into(t, out);
    return out;
}

std::string print_rule(const Rule& r) {
    std::string out;
    print_into(r.conclusion, out);
    if (!r.premises.empty()) {
        out += " :- ";
        for (std::size_t i = 0; i < r.premises.size(); ++i) {
            if (i > 0) out += ", ";
            print_into(r.premises[i], out);
        }
    }
    out += '.';
    return out;
}

std::string print_program(const Program& p) {
    std::string out;
    for (const Rule& r : p) {
        out += print_rule(r);
        out += '\n';
    }
    return out;
}

}  // namespace nanolog

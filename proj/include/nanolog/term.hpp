#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nanolog {

/// Separator between a variable's source name and the instance id appended
/// when a rule is renamed apart. Never accepted by the parser.
inline constexpr char rename_separator = '.';

/// Default maximum chase depth for substitution.
inline constexpr std::size_t default_subst_budget = 4096;

/// Immutable Prolog term: a variable, or a functor applied to arguments.
/// Copies share structure; equality is structural and name-sensitive.
class Term {
public:
    static Term variable(std::string name);
    static Term compound(std::string functor, std::vector<Term> args = {});

    bool is_variable() const noexcept { return node_->is_var; }
    bool is_compound() const noexcept { return !node_->is_var; }
    bool is_constant() const noexcept { return !node_->is_var && node_->args.empty(); }

    /// Variable name or functor name.
    const std::string& name() const noexcept { return node_->name; }
    std::span<const Term> args() const noexcept { return node_->args; }
    std::size_t arity() const noexcept { return node_->args.size(); }

    /// Pointer identity; lets substitution skip rebuilding unchanged subterms.
    bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator<(const Term& a, const Term& b);

private:
    struct Node {
        bool is_var;
        std::string name;
        std::vector<Term> args;
    };

    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

/// `conclusion :- premises.`; a fact has no premises.
struct Rule {
    Term conclusion;
    std::vector<Term> premises;

    /// Throws Error(BareVariableHead) if the conclusion is a variable.
    Rule(Term conclusion, std::vector<Term> premises = {});

    bool is_fact() const noexcept { return premises.empty(); }

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// Rule order is significant: resolution tries rules in listed order.
using Program = std::vector<Rule>;

/// Substitution environment: variable name -> term. Bindings are triangular;
/// a bound term may mention other bound variables, resolved by chasing.
class Env {
public:
    using Map = std::map<std::string, Term, std::less<>>;

    Env() = default;

    /// Returns a copy of this environment extended with `name -> value`.
    /// Throws std::invalid_argument for a self-binding `X -> X`.
    Env bind(const std::string& name, Term value) const;

    /// Direct binding for `name`, or nullptr.
    const Term* lookup(std::string_view name) const;

    bool empty() const noexcept { return bindings_.empty(); }
    std::size_t size() const noexcept { return bindings_.size(); }
    const Map& bindings() const noexcept { return bindings_; }

    friend bool operator==(const Env&, const Env&) = default;

private:
    Map bindings_;
};

/// Replaces bound variables by their chased bindings. Each nested lookup is a
/// chase step; more than `depth_budget` nested steps throws BudgetExhausted.
Term apply_subst(const Env& env, const Term& t, std::size_t depth_budget = default_subst_budget);
std::vector<Term> apply_subst(const Env& env, std::span<const Term> ts,
                              std::size_t depth_budget = default_subst_budget);
Rule apply_subst(const Env& env, const Rule& r, std::size_t depth_budget = default_subst_budget);

/// Rewrites every variable V in `r` to V.<instance_id>.
Rule rename_rule(const Rule& r, std::size_t instance_id);

/// Strips a trailing ".<digits>" rename suffix, if present.
std::string_view base_variable_name(std::string_view name);

/// Variable names in order of first occurrence, without duplicates.
std::vector<std::string> term_vars(const Term& t);
std::vector<std::string> term_vars(std::span<const Term> ts);
std::vector<std::string> term_vars(const Rule& r);

/// `[A-Z][A-Za-z0-9_]*`, optionally followed by a rename suffix when
/// `allow_renamed` is set.
bool is_valid_variable_name(std::string_view name, bool allow_renamed = false);
bool is_valid_functor_name(std::string_view name);

// Canonical text form: `f(a,X)`, `head :- p1, p2.`, `head.`
std::string print_term(const Term& t);
std::string print_rule(const Rule& r);
/// One rule per line, each line newline-terminated.
std::string print_program(const Program& p);

}  // namespace nanolog

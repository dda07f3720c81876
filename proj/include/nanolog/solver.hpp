#pragma once

#include "nanolog/term.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nanolog {

enum class Strategy { Dfs, Bfs, Iddfs };

/// Which limit stopped a search.
enum class BudgetKind { MaxDepth, MaxSolutions, Steps, Subst, Time };

std::string_view to_string(Strategy s);
std::string_view to_string(BudgetKind b);
std::optional<Strategy> parse_strategy(std::string_view text);

struct SolveOptions {
    Strategy strategy = Strategy::Dfs;
    /// Rule applications along one path.
    std::size_t max_depth = 256;
    std::size_t max_solutions = 10;
    /// Total unification attempts across the whole run.
    std::size_t step_budget = 100000;
    std::size_t subst_budget = default_subst_budget;
    std::optional<std::chrono::steady_clock::time_point> deadline;

    /// Throws std::invalid_argument unless every count is at least 1.
    void validate() const;
};

/// One rule application: the rule as written, the instance id it was renamed
/// with, the goal it closed (substituted at the time), and the goal's depth
/// in the proof tree (query goals are depth 0).
struct TraceEntry {
    Rule rule;
    std::size_t instance_id;
    Term goal;
    std::size_t depth;
};

using Trace = std::vector<TraceEntry>;

struct Solution {
    Env env;
    Trace trace;
    /// Query variable -> fully chased term, in order of first occurrence.
    std::vector<std::pair<std::string, Term>> bindings;
    /// Some binding could not be chased within the substitution budget; its
    /// value is then the variable's direct binding.
    bool cyclic = false;

    /// Bindings as a map, for order-insensitive comparison.
    std::map<std::string, Term> binding_map() const;
};

struct SolveOutcome {
    std::vector<Solution> solutions;
    /// True iff the whole search space was explored within every budget.
    bool exhausted = false;
    std::optional<BudgetKind> budget_hit;
};

/// Incremental SLD resolution over `program` for a conjunction of goals.
/// Each call to next() resumes the search where the previous one stopped.
///
/// Every rule attempt renames the rule with a fresh instance id drawn from a
/// per-run counter, so runs are deterministic.
class SolutionStream {
public:
    /// Throws std::invalid_argument for empty goals or invalid options.
    SolutionStream(Program program, std::vector<Term> goals, SolveOptions opts = {});
    ~SolutionStream();
    SolutionStream(SolutionStream&&) noexcept;
    SolutionStream& operator=(SolutionStream&&) noexcept;

    std::optional<Solution> next();

    /// Search is over: no further call to next() can produce a solution.
    bool finished() const noexcept;
    bool exhausted() const noexcept;
    std::optional<BudgetKind> budget_hit() const noexcept;
    std::size_t steps() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SolveOutcome solve(const Program& program, std::span<const Term> goals,
                   const SolveOptions& opts = {});

/// The resolution tree. A Branch's children follow program rule order,
/// keeping only rules whose conclusion unified; a childless Branch is a dead
/// end. Truncated marks nodes cut off by max_depth or the step budget.
struct SearchTree {
    enum class Kind { Solution, Branch, Truncated };

    struct Child;

    Kind kind = Kind::Branch;
    Env env;
    std::vector<Term> goals;
    std::vector<Child> children;
};

struct SearchTree::Child {
    Rule rule;  // renamed instance
    std::size_t instance_id;
    SearchTree subtree;
};

SearchTree build_tree(const Program& program, std::span<const Term> goals,
                      const SolveOptions& opts = {});

}  // namespace nanolog

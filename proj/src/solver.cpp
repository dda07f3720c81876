#include "nanolog/solver.hpp"

#include "nanolog/error.hpp"
#include "nanolog/unify.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace nanolog {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Dfs: return "dfs";
        case Strategy::Bfs: return "bfs";
        case Strategy::Iddfs: return "iddfs";
    }
    return "dfs";
}

std::string_view to_string(BudgetKind b) {
    switch (b) {
        case BudgetKind::MaxDepth: return "max_depth";
        case BudgetKind::MaxSolutions: return "max_solutions";
        case BudgetKind::Steps: return "step_budget";
        case BudgetKind::Subst: return "subst_budget";
        case BudgetKind::Time: return "time";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "dfs") return Strategy::Dfs;
    if (text == "bfs") return Strategy::Bfs;
    if (text == "iddfs") return Strategy::Iddfs;
    return std::nullopt;
}

void SolveOptions::validate() const {
    if (max_depth < 1 || max_solutions < 1 || step_budget < 1 || subst_budget < 1) {
        throw std::invalid_argument("solve options: every budget must be at least 1");
    }
}

std::map<std::string, Term> Solution::binding_map() const {
    return {bindings.begin(), bindings.end()};
}

namespace {

// Persistent goal stack; premises are pushed in front of the remaining goals.
struct GoalCell {
    Term goal;
    std::size_t depth;
    std::shared_ptr<const GoalCell> next;
};
using GoalList = std::shared_ptr<const GoalCell>;

struct TraceCell {
    TraceEntry entry;
    std::shared_ptr<const TraceCell> prev;
};
using TraceList = std::shared_ptr<const TraceCell>;

struct State {
    Env env;
    GoalList goals;
    TraceList trace;
    std::size_t depth = 0;  // rule applications from the root
};

GoalList make_goal_list(std::span<const Term> goals) {
    GoalList list;
    for (auto it = goals.rbegin(); it != goals.rend(); ++it) {
        list = std::make_shared<const GoalCell>(GoalCell{*it, 0, std::move(list)});
    }
    return list;
}

std::vector<Term> goal_vector(GoalList g) {
    std::vector<Term> out;
    for (; g; g = g->next) out.push_back(g->goal);
    return out;
}

Trace materialize(TraceList t, std::size_t length) {
    Trace out;
    out.reserve(length);
    for (; t; t = t->prev) out.push_back(t->entry);
    std::reverse(out.begin(), out.end());
    return out;
}

enum class Attempt { Ok, NoMatch, Pruned, Stop };

// Shared between the streaming search and build_tree: applies one program
// rule to the first goal of a state, counting steps against the budgets.
class Expander {
public:
    Expander(const Program& program, const SolveOptions& opts) : program_(program), opts_(opts) {}

    const Program& program() const { return program_; }
    std::size_t steps() const { return steps_; }
    std::optional<BudgetKind> stop_reason() const { return stop_; }
    void reset_instances() { next_instance_ = 1; }

    /// Substituted first goal; nullopt when the substitution budget ran out.
    std::optional<Term> resolve_first(const State& s) {
        try {
            return apply_subst(s.env, s.goals->goal, opts_.subst_budget);
        } catch (const BudgetExhausted&) {
            pruned_ = true;
            return std::nullopt;
        }
    }

    Attempt attempt(const State& s, const Term& goal, std::size_t rule_index, State& child,
                    Rule* renamed_out = nullptr, std::size_t* id_out = nullptr) {
        if (steps_ >= opts_.step_budget) {
            stop_ = BudgetKind::Steps;
            return Attempt::Stop;
        }
        if (opts_.deadline && (steps_ & 63U) == 0 &&
            std::chrono::steady_clock::now() >= *opts_.deadline) {
            stop_ = BudgetKind::Time;
            return Attempt::Stop;
        }
        ++steps_;
        const std::size_t id = next_instance_++;
        const Rule& rule = program_[rule_index];

        // Cheap functor/arity filter before renaming.
        if (goal.is_compound() &&
            (goal.name() != rule.conclusion.name() || goal.arity() != rule.conclusion.arity())) {
            return Attempt::NoMatch;
        }

        Rule renamed = rename_rule(rule, id);
        std::optional<Env> env;
        try {
            env = unify(goal, renamed.conclusion, s.env, opts_.subst_budget);
        } catch (const BudgetExhausted&) {
            pruned_ = true;
            return Attempt::Pruned;
        }
        if (!env) return Attempt::NoMatch;

        const std::size_t goal_depth = s.goals->depth;
        GoalList rest = s.goals->next;
        for (auto it = renamed.premises.rbegin(); it != renamed.premises.rend(); ++it) {
            rest = std::make_shared<const GoalCell>(GoalCell{*it, goal_depth + 1, std::move(rest)});
        }
        child.env = std::move(*env);
        child.goals = std::move(rest);
        child.trace = std::make_shared<const TraceCell>(
            TraceCell{TraceEntry{rule, id, goal, goal_depth}, s.trace});
        child.depth = s.depth + 1;
        if (renamed_out != nullptr) *renamed_out = std::move(renamed);
        if (id_out != nullptr) *id_out = id;
        return Attempt::Ok;
    }

    bool pruned() const { return pruned_; }

private:
    const Program& program_;
    const SolveOptions& opts_;
    std::size_t steps_ = 0;
    std::size_t next_instance_ = 1;
    bool pruned_ = false;
    std::optional<BudgetKind> stop_;
};

}  // namespace

// ---------------------------------------------------------------------------
// SolutionStream

struct SolutionStream::Impl {
    struct Frame {
        explicit Frame(State s) : state(std::move(s)) {}

        State state;
        std::optional<Term> goal;  // substituted first goal, computed lazily
        std::size_t next_rule = 0;
        bool resolved = false;
    };

    Program program;
    std::vector<Term> query;
    std::vector<std::string> query_vars;
    SolveOptions opts;
    Expander expander;

    std::vector<Frame> stack;      // dfs / iddfs
    std::deque<State> queue;       // bfs
    std::size_t depth_limit = 0;   // iddfs iteration limit
    bool truncated_this_round = false;

    std::size_t produced = 0;
    bool done = false;
    bool exhausted = false;
    std::optional<BudgetKind> budget;

    Impl(Program p, std::vector<Term> goals, SolveOptions o)
        : program(std::move(p)), query(std::move(goals)), opts(o), expander(program, opts) {
        query_vars = term_vars(query);
        State root{Env{}, make_goal_list(query), nullptr, 0};
        switch (opts.strategy) {
            case Strategy::Dfs:
                depth_limit = opts.max_depth;
                stack.push_back(Frame{std::move(root)});
                break;
            case Strategy::Iddfs:
                depth_limit = 1;
                stack.push_back(Frame{std::move(root)});
                break;
            case Strategy::Bfs:
                queue.push_back(std::move(root));
                break;
        }
    }

    void stop(BudgetKind why) {
        done = true;
        exhausted = false;
        budget = why;
    }

    void finish() {
        done = true;
        if (expander.pruned()) {
            budget = BudgetKind::Subst;
        } else {
            exhausted = true;
        }
    }

    Solution make_solution(const State& s) {
        Solution sol;
        sol.env = s.env;
        sol.trace = materialize(s.trace, s.depth);
        for (const std::string& v : query_vars) {
            try {
                sol.bindings.emplace_back(v, apply_subst(s.env, Term::variable(v), opts.subst_budget));
            } catch (const BudgetExhausted&) {
                sol.cyclic = true;
                const Term* direct = s.env.lookup(v);
                sol.bindings.emplace_back(v, direct ? *direct : Term::variable(v));
            }
        }
        return sol;
    }

    bool frontier_empty() const {
        return opts.strategy == Strategy::Bfs ? queue.empty() : stack.empty();
    }

    Solution emit(const State& s) {
        Solution sol = make_solution(s);
        ++produced;
        if (produced >= opts.max_solutions) {
            if (frontier_empty() && opts.strategy != Strategy::Iddfs) {
                finish();
            } else {
                stop(BudgetKind::MaxSolutions);
            }
        }
        return sol;
    }

    // Ends one iddfs round; returns false when the whole search is over.
    bool next_round() {
        if (!truncated_this_round) {
            finish();
            return false;
        }
        if (depth_limit >= opts.max_depth) {
            stop(BudgetKind::MaxDepth);
            return false;
        }
        ++depth_limit;
        truncated_this_round = false;
        expander.reset_instances();
        stack.push_back(Frame{State{Env{}, make_goal_list(query), nullptr, 0}});
        return true;
    }

    std::optional<Solution> next_depth_first() {
        const bool iterative = opts.strategy == Strategy::Iddfs;
        while (!done) {
            if (stack.empty()) {
                if (!iterative || !next_round()) {
                    if (!done) finish();
                    return std::nullopt;
                }
                continue;
            }
            Frame& top = stack.back();
            if (!top.state.goals) {
                State s = std::move(top.state);
                stack.pop_back();
                // A depth-d solution is found again in every round >= d;
                // report it only in round d.
                if (iterative && s.depth != depth_limit) continue;
                return emit(s);
            }
            if (top.state.depth >= depth_limit) {
                if (!iterative) {
                    stop(BudgetKind::MaxDepth);
                    return std::nullopt;
                }
                truncated_this_round = true;
                stack.pop_back();
                continue;
            }
            if (!top.resolved) {
                top.resolved = true;
                top.goal = expander.resolve_first(top.state);
            }
            if (!top.goal || top.next_rule >= program.size()) {
                stack.pop_back();
                continue;
            }
            State child;
            const std::size_t rule_index = top.next_rule++;
            switch (expander.attempt(top.state, *top.goal, rule_index, child)) {
                case Attempt::Ok: stack.push_back(Frame{std::move(child)}); break;
                case Attempt::Stop: stop(*expander.stop_reason()); return std::nullopt;
                case Attempt::NoMatch:
                case Attempt::Pruned: break;
            }
        }
        return std::nullopt;
    }

    std::optional<Solution> next_breadth_first() {
        while (!done) {
            if (queue.empty()) {
                finish();
                return std::nullopt;
            }
            State s = std::move(queue.front());
            queue.pop_front();
            if (!s.goals) return emit(s);
            if (s.depth >= opts.max_depth) {
                stop(BudgetKind::MaxDepth);
                return std::nullopt;
            }
            std::optional<Term> goal = expander.resolve_first(s);
            if (!goal) continue;
            for (std::size_t r = 0; r < program.size(); ++r) {
                State child;
                Attempt a = expander.attempt(s, *goal, r, child);
                if (a == Attempt::Stop) {
                    stop(*expander.stop_reason());
                    return std::nullopt;
                }
                if (a == Attempt::Ok) queue.push_back(std::move(child));
            }
        }
        return std::nullopt;
    }
};

SolutionStream::SolutionStream(Program program, std::vector<Term> goals, SolveOptions opts) {
    if (goals.empty()) throw std::invalid_argument("solve: goal list must not be empty");
    opts.validate();
    impl_ = std::make_unique<Impl>(std::move(program), std::move(goals), opts);
}

SolutionStream::~SolutionStream() = default;
SolutionStream::SolutionStream(SolutionStream&&) noexcept = default;
SolutionStream& SolutionStream::operator=(SolutionStream&&) noexcept = default;

std::optional<Solution> SolutionStream::next() {
    if (impl_->done) return std::nullopt;
    return impl_->opts.strategy == Strategy::Bfs ? impl_->next_breadth_first()
                                                 : impl_->next_depth_first();
}

bool SolutionStream::finished() const noexcept { return impl_->done; }
bool SolutionStream::exhausted() const noexcept { return impl_->exhausted; }
std::optional<BudgetKind> SolutionStream::budget_hit() const noexcept { return impl_->budget; }
std::size_t SolutionStream::steps() const noexcept { return impl_->expander.steps(); }

SolveOutcome solve(const Program& program, std::span<const Term> goals, const SolveOptions& opts) {
    SolutionStream stream(program, {goals.begin(), goals.end()}, opts);
    SolveOutcome out;
    while (auto sol = stream.next()) out.solutions.push_back(std::move(*sol));
    out.exhausted = stream.exhausted();
    out.budget_hit = stream.budget_hit();
    return out;
}

// ---------------------------------------------------------------------------
// build_tree

namespace {

SearchTree grow(Expander& ex, const State& s, std::size_t max_depth) {
    SearchTree node;
    node.env = s.env;
    node.goals = goal_vector(s.goals);
    if (!s.goals) {
        node.kind = SearchTree::Kind::Solution;
        return node;
    }
    if (s.depth >= max_depth || ex.stop_reason()) {
        node.kind = SearchTree::Kind::Truncated;
        return node;
    }
    node.kind = SearchTree::Kind::Branch;
    std::optional<Term> goal = ex.resolve_first(s);
    if (!goal) return node;
    for (std::size_t r = 0; r < ex.program().size(); ++r) {
        State child;
        Rule renamed = ex.program()[r];
        std::size_t id = 0;
        Attempt a = ex.attempt(s, *goal, r, child, &renamed, &id);
        if (a == Attempt::Stop) {
            node.kind = SearchTree::Kind::Truncated;
            break;
        }
        if (a == Attempt::Ok) {
            node.children.push_back(
                SearchTree::Child{std::move(renamed), id, grow(ex, child, max_depth)});
        }
    }
    return node;
}

}  // namespace

SearchTree build_tree(const Program& program, std::span<const Term> goals, const SolveOptions& opts) {
    if (goals.empty()) throw std::invalid_argument("build_tree: goal list must not be empty");
    opts.validate();
    Expander ex(program, opts);
    return grow(ex, State{Env{}, make_goal_list(goals), nullptr, 0}, opts.max_depth);
}

}  // namespace nanolog

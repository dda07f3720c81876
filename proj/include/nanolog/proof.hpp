#pragma once

#include "nanolog/solver.hpp"
#include "nanolog/term.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace nanolog {

struct AppliedRule {
    Rule rule;  // as written, before renaming
    std::size_t instance_id;

    friend bool operator==(const AppliedRule&, const AppliedRule&) = default;
};

/// A goal in an interactive proof. Open while `applied` is empty; once a rule
/// is applied it has one child per premise of that rule.
struct ProofNode {
    Term goal;  // displayed form: substituted under the proof's env
    std::optional<AppliedRule> applied;
    std::vector<ProofNode> children;

    friend bool operator==(const ProofNode&, const ProofNode&) = default;
};

struct ProofSnapshot {
    ProofNode root;
    Env env;
    std::size_t next_instance;

    friend bool operator==(const ProofSnapshot&, const ProofSnapshot&) = default;
};

/// One global substitution covers the whole tree; every operation is
/// functional and a failed one leaves the input untouched.
struct ProofState {
    ProofNode root;
    Env env;
    std::size_t next_instance = 1;
    std::vector<ProofSnapshot> history;

    friend bool operator==(const ProofState&, const ProofState&) = default;
};

/// Child indices from the root.
using NodePath = std::vector<std::size_t>;

enum class NodeStatus { Open, Complete };

/// Mirrors the proof tree. `status` is the subtree status; `rule_applied`
/// tells a closed node with open descendants apart from an open leaf.
struct StatusTree {
    NodeStatus status;
    bool rule_applied;
    std::vector<StatusTree> children;
};

ProofState new_proof(Term goal);

/// Renames `rule` with the state's next instance id and unifies its
/// conclusion with the open goal at `path`, conclusion first: a goal
/// variable meeting a rule variable keeps its own name on display. Errors: BadPath, NodeNotOpen,
/// UnificationFailed, BudgetExhausted.
ProofState apply_rule(const ProofState& state, const NodePath& path, const Rule& rule,
                      std::size_t subst_budget = default_subst_budget);

/// Same, with an explicit instance id and the solver's goal-first
/// orientation, so replayed displays match solver traces exactly.
ProofState apply_rule_as(const ProofState& state, const NodePath& path, const Rule& rule,
                         std::size_t instance_id, std::size_t subst_budget = default_subst_budget);

/// Unifies variable `var` (renamed names allowed) with `replacement`.
/// Errors: InvalidVariable, UnificationFailed, BudgetExhausted.
ProofState apply_manual_subst(const ProofState& state, std::string_view var,
                              const Term& replacement,
                              std::size_t subst_budget = default_subst_budget);

StatusTree status(const ProofState& state);
bool is_complete(const ProofState& state);

/// Pre-order first node with no rule applied.
std::optional<NodePath> leftmost_open(const ProofState& state);

const ProofNode& node_at(const ProofState& state, const NodePath& path);

/// Restores the latest snapshot. Error: EmptyHistory.
ProofState undo(const ProofState& state);

/// Applies each trace entry to the leftmost open node. Error: ReplayMismatch
/// if an entry does not fit or the proof is not complete afterwards.
ProofState replay(Term goal, const Trace& trace, std::size_t subst_budget = default_subst_budget);

}  // namespace nanolog

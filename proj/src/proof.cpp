#include "nanolog/proof.hpp"

#include "nanolog/error.hpp"
#include "nanolog/unify.hpp"

#include <algorithm>
#include <string>

namespace nanolog {

namespace {

std::string path_text(const NodePath& path) {
    std::string out = "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(path[i]);
    }
    return out + "]";
}

template <class Node>
Node* find(Node& root, const NodePath& path) {
    Node* node = &root;
    for (std::size_t idx : path) {
        if (idx >= node->children.size()) return nullptr;
        node = &node->children[idx];
    }
    return node;
}

void resubstitute(ProofNode& node, const Env& env, std::size_t budget) {
    node.goal = apply_subst(env, node.goal, budget);
    for (ProofNode& c : node.children) resubstitute(c, env, budget);
}

StatusTree status_of(const ProofNode& node) {
    StatusTree st{NodeStatus::Open, node.applied.has_value(), {}};
    st.children.reserve(node.children.size());
    bool all_complete = true;
    for (const ProofNode& c : node.children) {
        st.children.push_back(status_of(c));
        all_complete = all_complete && st.children.back().status == NodeStatus::Complete;
    }
    if (node.applied && all_complete) st.status = NodeStatus::Complete;
    return st;
}

bool find_open(const ProofNode& node, NodePath& path) {
    if (!node.applied) return true;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(i);
        if (find_open(node.children[i], path)) return true;
        path.pop_back();
    }
    return false;
}

// Commits a new root/env pair: pushes the current state as a snapshot and
// re-displays the whole tree under `env`.
ProofState commit(const ProofState& state, ProofNode root, Env env, std::size_t next_instance,
                  std::size_t budget) {
    resubstitute(root, env, budget);
    ProofState out{std::move(root), std::move(env), next_instance, state.history};
    out.history.push_back(ProofSnapshot{state.root, state.env, state.next_instance});
    return out;
}

}  // namespace

ProofState new_proof(Term goal) {
    return ProofState{ProofNode{std::move(goal), std::nullopt, {}}, Env{}, 1, {}};
}

const ProofNode& node_at(const ProofState& state, const NodePath& path) {
    const ProofNode* node = find(state.root, path);
    if (node == nullptr) throw Error(ErrorKind::BadPath, "no node at path " + path_text(path));
    return *node;
}

namespace {

// `goal_first` picks which side a variable-variable pair binds from.
ProofState apply_impl(const ProofState& state, const NodePath& path, const Rule& rule,
                      std::size_t instance_id, std::size_t subst_budget, bool goal_first) {
    ProofNode root = state.root;
    ProofNode* node = find(root, path);
    if (node == nullptr) throw Error(ErrorKind::BadPath, "no node at path " + path_text(path));
    if (node->applied) {
        throw Error(ErrorKind::NodeNotOpen,
                    "goal " + print_term(node->goal) + " already has a rule applied");
    }

    Rule renamed = rename_rule(rule, instance_id);
    std::optional<Env> env = goal_first
                                 ? unify(node->goal, renamed.conclusion, state.env, subst_budget)
                                 : unify(renamed.conclusion, node->goal, state.env, subst_budget);
    if (!env) {
        throw Error(ErrorKind::UnificationFailed, "cannot unify " + print_term(node->goal) +
                                                      " with " + print_term(renamed.conclusion));
    }

    node->applied = AppliedRule{rule, instance_id};
    node->children.clear();
    for (Term& p : renamed.premises) node->children.push_back(ProofNode{std::move(p), std::nullopt, {}});

    return commit(state, std::move(root), std::move(*env),
                  std::max(state.next_instance, instance_id + 1), subst_budget);
}

}  // namespace

ProofState apply_rule(const ProofState& state, const NodePath& path, const Rule& rule,
                      std::size_t subst_budget) {
    return apply_impl(state, path, rule, state.next_instance, subst_budget, false);
}

ProofState apply_rule_as(const ProofState& state, const NodePath& path, const Rule& rule,
                         std::size_t instance_id, std::size_t subst_budget) {
    return apply_impl(state, path, rule, instance_id, subst_budget, true);
}

ProofState apply_manual_subst(const ProofState& state, std::string_view var,
                              const Term& replacement, std::size_t subst_budget) {
    if (!is_valid_variable_name(var, true)) {
        throw Error(ErrorKind::InvalidVariable, "not a variable name: '" + std::string(var) + "'");
    }
    std::optional<Env> env =
        unify(Term::variable(std::string(var)), replacement, state.env, subst_budget);
    if (!env) {
        throw Error(ErrorKind::UnificationFailed,
                    "cannot substitute " + print_term(replacement) + " for " + std::string(var));
    }
    return commit(state, state.root, std::move(*env), state.next_instance, subst_budget);
}

StatusTree status(const ProofState& state) { return status_of(state.root); }

bool is_complete(const ProofState& state) {
    return status_of(state.root).status == NodeStatus::Complete;
}

std::optional<NodePath> leftmost_open(const ProofState& state) {
    NodePath path;
    if (find_open(state.root, path)) return path;
    return std::nullopt;
}

ProofState undo(const ProofState& state) {
    if (state.history.empty()) throw Error(ErrorKind::EmptyHistory, "nothing to undo");
    const ProofSnapshot& snap = state.history.back();
    ProofState out{snap.root, snap.env, snap.next_instance, state.history};
    out.history.pop_back();
    return out;
}

ProofState replay(Term goal, const Trace& trace, std::size_t subst_budget) {
    ProofState state = new_proof(std::move(goal));
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceEntry& entry = trace[i];
        std::optional<NodePath> path = leftmost_open(state);
        const std::string where = "trace entry " + std::to_string(i) + ": ";
        if (!path) throw Error(ErrorKind::ReplayMismatch, where + "no open goal left");
        const Term& open_goal = node_at(state, *path).goal;
        if (!(open_goal == entry.goal)) {
            throw Error(ErrorKind::ReplayMismatch, where + "expected goal " +
                                                       print_term(entry.goal) + ", found " +
                                                       print_term(open_goal));
        }
        try {
            state = apply_rule_as(state, *path, entry.rule, entry.instance_id, subst_budget);
        } catch (const Error& e) {
            throw Error(ErrorKind::ReplayMismatch, where + e.what());
        }
    }
    if (!is_complete(state)) {
        throw Error(ErrorKind::ReplayMismatch, "trace leaves open goals");
    }
    return state;
}

}  // namespace nanolog

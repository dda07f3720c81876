#include "nanolog/json_codec.hpp"

namespace nanolog {

using nlohmann::json;

json query_response(const SolveOutcome& outcome) {
    json solutions = json::array();
    for (const Solution& s : outcome.solutions) {
        json bindings = json::object();
        for (const auto& [name, value] : s.bindings) bindings[name] = print_term(value);
        json trace = json::array();
        for (const TraceEntry& e : s.trace) {
            trace.push_back({{"rule", print_rule(e.rule)}, {"goal", print_term(e.goal)}, {"depth", e.depth}});
        }
        solutions.push_back({{"bindings", std::move(bindings)}, {"cyclic", s.cyclic}, {"trace", std::move(trace)}});
    }
    json out = {{"solutions", std::move(solutions)}, {"exhausted", outcome.exhausted}};
    if (outcome.budget_hit) {
        out["budget_hit"] = to_string(*outcome.budget_hit);
    } else {
        out["budget_hit"] = nullptr;
    }
    return out;
}

namespace {

json node_json(const ProofNode& node, const StatusTree& st) {
    json children = json::array();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        children.push_back(node_json(node.children[i], st.children[i]));
    }
    json out = {
        {"goal", print_term(node.goal)},
        {"rule_applied", st.rule_applied},
        {"status", st.status == NodeStatus::Complete ? "complete" : "open"},
        {"children", std::move(children)},
    };
    if (node.applied) {
        out["applied_rule"] = print_rule(node.applied->rule);
        out["instance_id"] = node.applied->instance_id;
    } else {
        out["applied_rule"] = nullptr;
        out["instance_id"] = nullptr;
    }
    return out;
}

}  // namespace

json proof_tree_json(const ProofState& state) { return node_json(state.root, status(state)); }

json proof_json(const ProofState& state) {
    json env = json::object();
    for (const auto& [name, value] : state.env.bindings()) env[name] = print_term(value);
    return {
        {"tree", proof_tree_json(state)},
        {"complete", is_complete(state)},
        {"env", std::move(env)},
        {"can_undo", !state.history.empty()},
    };
}

}  // namespace nanolog

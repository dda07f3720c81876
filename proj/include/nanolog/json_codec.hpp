#pragma once

#include "nanolog/proof.hpp"
#include "nanolog/solver.hpp"

#include <json.hpp>

namespace nanolog {

/// Query response body shared by the HTTP service and `nanolog solve --json`:
///
///   {"solutions": [{"bindings": {"Q": "carol"}, "cyclic": false,
///                   "trace": [{"rule": "...", "goal": "...", "depth": 0}]}],
///    "exhausted": true, "budget_hit": null}
nlohmann::json query_response(const SolveOutcome& outcome);

/// Proof tree as rendered by the UI. Each node carries its own status so the
/// client never re-derives semantics:
///
///   {"goal": "...", "applied_rule": "..."|null, "instance_id": 3|null,
///    "rule_applied": bool, "status": "open"|"complete", "children": [...]}
nlohmann::json proof_tree_json(const ProofState& state);

/// {"tree": ..., "complete": bool, "env": {"Var": "term"}, "can_undo": bool}
nlohmann::json proof_json(const ProofState& state);

}  // namespace nanolog

#pragma once

#include "nanolog/term.hpp"

#include <optional>

namespace nanolog {

/// Unifies `t` and `u` after substituting both under `env`. A variable binds
/// to the other side (left variable first); compounds unify argument-wise,
/// threading the environment left to right. There is no occurs check, so
/// `X` against `f(X)` succeeds with a cyclic binding.
///
/// An absent input env yields an absent result. Failure is std::nullopt;
/// BudgetExhausted propagates from the substitution step.
std::optional<Env> unify(const Term& t, const Term& u, std::optional<Env> env,
                         std::size_t subst_budget = default_subst_budget);

}  // namespace nanolog

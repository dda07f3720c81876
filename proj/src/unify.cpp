#include "nanolog/unify.hpp"

namespace nanolog {

namespace {

// Both sides already substituted under `env`.
std::optional<Env> unify_resolved(const Term& t, const Term& u, Env env, std::size_t budget) {
    if (t.is_variable()) {
        if (u.is_variable() && u.name() == t.name()) return env;
        return env.bind(t.name(), u);
    }
    if (u.is_variable()) return env.bind(u.name(), t);

    if (t.name() != u.name() || t.arity() != u.arity()) return std::nullopt;

    std::optional<Env> acc = std::move(env);
    for (std::size_t i = 0; i < t.arity() && acc; ++i) {
        acc = unify(t.args()[i], u.args()[i], std::move(acc), budget);
    }
    return acc;
}

}  // namespace

std::optional<Env> unify(const Term& t, const Term& u, std::optional<Env> env,
                         std::size_t subst_budget) {
    if (!env) return std::nullopt;
    Term ts = apply_subst(*env, t, subst_budget);
    Term us = apply_subst(*env, u, subst_budget);
    return unify_resolved(ts, us, std::move(*env), subst_budget);
}

}  // namespace nanolog

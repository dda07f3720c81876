#include <doctest.h>

#include "corpus.hpp"
#include "nanolog/error.hpp"
#include "nanolog/parser.hpp"
#include "nanolog/proof.hpp"
#include "nanolog/solver.hpp"

using namespace nanolog;

namespace {

Term T(const char* src) { return parse_term(src); }
Rule R(const char* src) { return parse_rule(src); }

const Rule grandparent_rule = R("grandparent(X,Y) :- parent(X,Z), parent(Z,Y).");

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    throw std::logic_error("unreachable");
}

// Every displayed goal is already fully substituted.
void check_display_coherent(const ProofState& s) {
    auto walk = [&](auto&& self, const ProofNode& n) -> void {
        CHECK(apply_subst(s.env, n.goal) == n.goal);
        for (const ProofNode& c : n.children) self(self, c);
    };
    walk(walk, s.root);
}

ProofState grandparent_started() {
    return apply_rule(new_proof(T("grandparent(alice,Q)")), {}, grandparent_rule);
}

}  // namespace

TEST_SUITE("new_proof") {
    TEST_CASE("root is open with an empty env") {
        ProofState s = new_proof(T("grandparent(alice,Q)"));
        CHECK(s.env.empty());
        CHECK(s.root.goal == T("grandparent(alice,Q)"));
        CHECK_FALSE(s.root.applied);
        CHECK(status(s).status == NodeStatus::Open);
        CHECK_FALSE(status(s).rule_applied);
        CHECK_FALSE(is_complete(s));
        CHECK(leftmost_open(s) == NodePath{});
    }

    TEST_CASE("undo on a fresh proof") {
        CHECK(kind_of([] { undo(new_proof(T("a"))); }) == ErrorKind::EmptyHistory);
    }
}

TEST_SUITE("apply_rule") {
    TEST_CASE("grandparent rule opens two children") {
        ProofState s = grandparent_started();
        REQUIRE(s.root.applied);
        CHECK(s.root.applied->rule == grandparent_rule);
        CHECK(s.root.applied->instance_id == 1);
        REQUIRE(s.root.children.size() == 2);
        CHECK(print_term(s.root.children[0].goal) == "parent(alice,Z.1)");
        CHECK(print_term(s.root.children[1].goal) == "parent(Z.1,Q)");
        CHECK(apply_subst(s.env, T("Q")) == T("Q"));
        CHECK(s.next_instance == 2);
        CHECK(s.history.size() == 1);

        StatusTree st = status(s);
        CHECK(st.status == NodeStatus::Open);
        CHECK(st.rule_applied);
        REQUIRE(st.children.size() == 2);
        CHECK(st.children[0].status == NodeStatus::Open);
        CHECK(st.children[1].status == NodeStatus::Open);
        CHECK(leftmost_open(s) == NodePath{0});
        check_display_coherent(s);
    }

    TEST_CASE("fact closes a child and re-displays the sibling") {
        ProofState s = apply_rule(grandparent_started(), {0}, R("parent(alice,bob)."));
        CHECK(s.root.children[0].goal == T("parent(alice,bob)"));
        CHECK(status(s).children[0].status == NodeStatus::Complete);
        CHECK(apply_subst(s.env, Term::variable("Z.1")) == T("bob"));
        CHECK(s.root.children[1].goal == T("parent(bob,Q)"));
        CHECK(leftmost_open(s) == NodePath{1});
        check_display_coherent(s);

        ProofState done = apply_rule(s, {1}, R("parent(bob,carol)."));
        CHECK(is_complete(done));
        CHECK(status(done).status == NodeStatus::Complete);
        CHECK(apply_subst(done.env, T("Q")) == T("carol"));
        CHECK(done.root.goal == T("grandparent(alice,carol)"));
        CHECK_FALSE(leftmost_open(done));
    }

    TEST_CASE("clash leaves the state unchanged") {
        ProofState s = grandparent_started();
        ProofState copy = s;
        CHECK(kind_of([&] { apply_rule(s, {0}, R("parent(carol,dave).")); }) ==
              ErrorKind::UnificationFailed);
        CHECK(s == copy);
    }

    TEST_CASE("closed node") {
        ProofState s = grandparent_started();
        CHECK(kind_of([&] { apply_rule(s, {}, grandparent_rule); }) == ErrorKind::NodeNotOpen);
    }

    TEST_CASE("bad path") {
        ProofState s = grandparent_started();
        CHECK(kind_of([&] { apply_rule(s, {2}, R("parent(alice,bob).")); }) == ErrorKind::BadPath);
        CHECK(kind_of([&] { apply_rule(s, {0, 0}, R("parent(alice,bob).")); }) ==
              ErrorKind::BadPath);
        CHECK(kind_of([&] { node_at(s, {5}); }) == ErrorKind::BadPath);
    }

    TEST_CASE("fact at the root completes the proof") {
        ProofState s = apply_rule(new_proof(T("parent(alice,X)")), {}, R("parent(alice,bob)."));
        CHECK(is_complete(s));
        CHECK(status(s).rule_applied);
        CHECK(s.root.children.empty());
    }

    TEST_CASE("figure shape: closed root, open children") {
        StatusTree st = status(grandparent_started());
        CHECK(st.rule_applied);
        CHECK(st.status == NodeStatus::Open);
    }

    TEST_CASE("cyclic unification reports budget exhaustion and changes nothing") {
        ProofState s = new_proof(T("q(X,X)"));
        ProofState copy = s;
        CHECK(kind_of([&] { apply_rule(s, {}, R("q(Y,f(Y))."), 16); }) ==
              ErrorKind::BudgetExhausted);
        CHECK(s == copy);
    }
}

TEST_SUITE("apply_manual_subst") {
    TEST_CASE("binds a renamed variable") {
        ProofState s = apply_manual_subst(grandparent_started(), "Z.1", T("bob"));
        CHECK(s.root.children[0].goal == T("parent(alice,bob)"));
        CHECK(s.history.size() == 2);
        check_display_coherent(s);
    }

    TEST_CASE("unused variable only extends the env") {
        ProofState before = grandparent_started();
        ProofState after = apply_manual_subst(before, "W", T("a"));
        CHECK(after.root == before.root);
        CHECK(after.next_instance == before.next_instance);
        CHECK(after.env.size() == before.env.size() + 1);
    }

    TEST_CASE("conflicting binding") {
        ProofState s = apply_manual_subst(grandparent_started(), "Z.1", T("bob"));
        ProofState copy = s;
        CHECK(kind_of([&] { apply_manual_subst(s, "Z.1", T("carol")); }) ==
              ErrorKind::UnificationFailed);
        CHECK(s == copy);
    }

    TEST_CASE("invalid variable names") {
        ProofState s = grandparent_started();
        CHECK(kind_of([&] { apply_manual_subst(s, "z", T("a")); }) == ErrorKind::InvalidVariable);
        CHECK(kind_of([&] { apply_manual_subst(s, "", T("a")); }) == ErrorKind::InvalidVariable);
        CHECK(kind_of([&] { apply_manual_subst(s, "X.y", T("a")); }) == ErrorKind::InvalidVariable);
    }
}

TEST_SUITE("undo") {
    TEST_CASE("apply then undo") {
        ProofState s0 = new_proof(T("grandparent(alice,Q)"));
        CHECK(undo(apply_rule(s0, {}, grandparent_rule)) == s0);
    }

    TEST_CASE("two applies, one undo") {
        ProofState s1 = grandparent_started();
        ProofState s2 = apply_rule(s1, {0}, R("parent(alice,bob)."));
        CHECK(undo(s2) == s1);
        CHECK(undo(undo(s2)) == new_proof(T("grandparent(alice,Q)")));
    }

    TEST_CASE("manual substitution undoes too") {
        ProofState s1 = grandparent_started();
        CHECK(undo(apply_manual_subst(s1, "Z.1", T("bob"))) == s1);
    }
}

TEST_SUITE("replay") {
    const Program gp = parse_program(
        "parent(alice,bob).\n"
        "parent(bob,carol).\n"
        "grandparent(X,Y) :- parent(X,Z), parent(Z,Y).\n");

    TEST_CASE("grandparent solver trace") {
        auto goals = parse_query("grandparent(alice,Q)");
        SolveOutcome o = solve(gp, goals);
        REQUIRE(o.solutions.size() == 1);
        ProofState s = replay(goals[0], o.solutions[0].trace);
        CHECK(is_complete(s));
        CHECK(s.root.goal == T("grandparent(alice,carol)"));
        CHECK(apply_subst(s.env, T("Q")) == T("carol"));
    }

    TEST_CASE("single fact record") {
        Trace tr{TraceEntry{R("parent(alice,bob)."), 1, T("parent(alice,bob)"), 0}};
        CHECK(is_complete(replay(T("parent(alice,bob)"), tr)));
    }

    TEST_CASE("different goal") {
        auto goals = parse_query("grandparent(alice,Q)");
        SolveOutcome o = solve(gp, goals);
        REQUIRE(o.solutions.size() == 1);
        CHECK(kind_of([&] { replay(T("grandparent(bob,Q)"), o.solutions[0].trace); }) ==
              ErrorKind::ReplayMismatch);
    }

    TEST_CASE("incomplete trace") {
        Trace tr{TraceEntry{grandparent_rule, 1, T("grandparent(alice,Q)"), 0}};
        CHECK(kind_of([&] { replay(T("grandparent(alice,Q)"), tr); }) == ErrorKind::ReplayMismatch);
    }

    TEST_CASE("empty trace on an open goal") {
        CHECK(kind_of([&] { replay(T("a"), {}); }) == ErrorKind::ReplayMismatch);
    }

    TEST_CASE("every corpus solution replays to its bindings") {
        std::size_t replayed = 0;
        for (const OracleCase& c : oracle_cases()) {
            auto goals = parse_query(c.query);
            if (goals.size() != 1) continue;
            CAPTURE(c.query);
            SolveOptions opts;
            opts.max_solutions = 50;
            SolveOutcome o = solve(load_corpus(c.file), goals, opts);
            for (const Solution& sol : o.solutions) {
                ProofState s = replay(goals[0], sol.trace);
                CHECK(is_complete(s));
                for (const auto& [var, value] : sol.bindings) {
                    CHECK(apply_subst(s.env, Term::variable(var)) == value);
                }
                check_display_coherent(s);
                ++replayed;
            }
        }
        CHECK(replayed >= 40);
    }
}

TEST_CASE("failed operations never touch history") {
    ProofState s = grandparent_started();
    const std::size_t h = s.history.size();
    for (int i = 0; i < 3; ++i) {
        try {
            s = apply_rule(s, {0}, R("parent(zed,bob)."));
        } catch (const Error&) {
        }
    }
    CHECK(s.history.size() == h);
}

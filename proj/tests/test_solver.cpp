#include <doctest.h>

#include "corpus.hpp"
#include "nanolog/parser.hpp"
#include "nanolog/solver.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <thread>

using namespace nanolog;

namespace {

Term T(const char* src) { return parse_term(src); }

SolveOutcome run(const Program& p, const std::string& query, SolveOptions opts = {}) {
    auto goals = parse_query(query);
    return solve(p, goals, opts);
}

std::vector<std::map<std::string, Term>> binding_list(const SolveOutcome& o) {
    std::vector<std::map<std::string, Term>> out;
    for (const Solution& s : o.solutions) out.push_back(s.binding_map());
    return out;
}

std::vector<std::map<std::string, Term>> sorted(std::vector<std::map<std::string, Term>> v) {
    std::sort(v.begin(), v.end());
    return v;
}

const Program grandparent_program = parse_program(
    "parent(alice,bob).\n"
    "parent(bob,carol).\n"
    "grandparent(X,Y) :- parent(X,Z), parent(Z,Y).\n");

const Program add_program = parse_program(
    "add(zero,X,X).\n"
    "add(s(X),Y,s(Z)) :- add(X,Y,Z).\n");

const Program path_program = parse_program(
    "edge(a,b).\n"
    "path(X,Y) :- path(X,Z), edge(Z,Y).\n"
    "path(X,Y) :- edge(X,Y).\n");

}  // namespace

TEST_SUITE("solve examples") {
    TEST_CASE("grandparent") {
        SolveOutcome o = run(grandparent_program, "grandparent(alice,Q)");
        REQUIRE(o.solutions.size() == 1);
        CHECK(o.solutions[0].binding_map() == std::map<std::string, Term>{{"Q", T("carol")}});
        CHECK(o.exhausted);
        CHECK_FALSE(o.budget_hit);
        // Oracle: bottom-up answers over the same program.
        auto model = oracle::least_model(grandparent_program, {T("alice"), T("bob"), T("carol")});
        auto expected = oracle::answers(parse_query("grandparent(alice,Q)"), model, {});
        CHECK(expected == std::set<oracle::Bindings>{{{"Q", T("carol")}}});
    }

    TEST_CASE("grandparent trace") {
        // Rules are tried in order; every attempt draws an instance id.
        // grandparent: ids 1,2 miss, 3 fits. parent(alice,Z.3): 4 fits.
        // parent(bob,Y.3): 5 misses, 6 fits.
        SolveOutcome o = run(grandparent_program, "grandparent(alice,Q)");
        REQUIRE(o.solutions.size() == 1);
        const Trace& tr = o.solutions[0].trace;
        REQUIRE(tr.size() == 3);
        CHECK(tr[0].rule == grandparent_program[2]);
        CHECK(tr[0].instance_id == 3);
        CHECK(tr[0].goal == T("grandparent(alice,Q)"));
        CHECK(tr[0].depth == 0);
        CHECK(tr[1].rule == grandparent_program[0]);
        CHECK(tr[1].instance_id == 4);
        CHECK(print_term(tr[1].goal) == "parent(alice,Z.3)");
        CHECK(tr[1].depth == 1);
        CHECK(tr[2].rule == grandparent_program[1]);
        CHECK(tr[2].instance_id == 6);
        // The query variable was bound to the rule's Y.3 (goal side binds first).
        CHECK(print_term(tr[2].goal) == "parent(bob,Y.3)");
        CHECK(tr[2].depth == 1);
    }

    TEST_CASE("peano addition") {
        SolveOutcome o = run(add_program, "add(s(zero),s(zero),R)");
        REQUIRE(o.solutions.size() == 1);
        CHECK(o.solutions[0].binding_map().at("R") == T("s(s(zero))"));
        CHECK(o.exhausted);
    }

    TEST_CASE("no matching rule") {
        SolveOutcome o = run(grandparent_program, "sibling(alice,X)");
        CHECK(o.solutions.empty());
        CHECK(o.exhausted);
        SearchTree tree = build_tree(grandparent_program, parse_query("sibling(alice,X)"));
        CHECK(tree.kind == SearchTree::Kind::Branch);
        CHECK(tree.children.empty());
    }

    TEST_CASE("left recursion: dfs hits max depth, bfs finds the answer") {
        SolveOutcome dfs = run(path_program, "path(a,b)");
        CHECK(dfs.solutions.empty());
        CHECK_FALSE(dfs.exhausted);
        REQUIRE(dfs.budget_hit);
        CHECK(*dfs.budget_hit == BudgetKind::MaxDepth);

        SolveOptions bfs_opts;
        bfs_opts.strategy = Strategy::Bfs;
        SolveOutcome bfs = run(path_program, "path(a,b)", bfs_opts);
        REQUIRE(bfs.solutions.size() >= 1);
        CHECK(bfs.solutions[0].bindings.empty());

        SolveOptions id_opts;
        id_opts.strategy = Strategy::Iddfs;
        SolveOutcome iddfs = run(path_program, "path(a,b)", id_opts);
        REQUIRE(iddfs.solutions.size() >= 1);
    }

    TEST_CASE("ground query yields empty bindings") {
        SolveOutcome o = run(grandparent_program, "parent(alice,bob)");
        REQUIRE(o.solutions.size() == 1);
        CHECK(o.solutions[0].bindings.empty());
    }

    TEST_CASE("conjunctive query") {
        SolveOutcome o = run(grandparent_program, "parent(X,Y), parent(Y,Z)");
        REQUIRE(o.solutions.size() == 1);
        CHECK(o.solutions[0].binding_map() ==
              std::map<std::string, Term>{{"X", T("alice")}, {"Y", T("bob")}, {"Z", T("carol")}});
        // Bindings are reported in order of first occurrence in the query.
        CHECK(o.solutions[0].bindings[0].first == "X");
        CHECK(o.solutions[0].bindings[2].first == "Z");
    }
}

TEST_SUITE("budgets") {
    TEST_CASE("max_solutions") {
        SolveOptions opts;
        opts.max_solutions = 2;
        SolveOutcome o = run(load_corpus("family.pl"), "parent(X,Y)", opts);
        CHECK(o.solutions.size() == 2);
        CHECK_FALSE(o.exhausted);
        CHECK(o.budget_hit == BudgetKind::MaxSolutions);
    }

    TEST_CASE("max_solutions with untried rules left") {
        SolveOptions opts;
        opts.max_solutions = 1;
        SolveOutcome o = run(grandparent_program, "parent(bob,X)", opts);
        CHECK(o.solutions.size() == 1);
        // The frontier still holds the untried grandparent rule, so the
        // search cannot claim exhaustion.
        CHECK(o.budget_hit == BudgetKind::MaxSolutions);
    }

    TEST_CASE("step budget") {
        SolveOptions opts;
        opts.strategy = Strategy::Bfs;
        opts.step_budget = 10;
        opts.max_depth = 1000;
        SolveOutcome o = run(load_corpus("peano.pl"), "nat(X)", opts);
        CHECK_FALSE(o.exhausted);
        CHECK(o.budget_hit == BudgetKind::Steps);
    }

    TEST_CASE("deadline") {
        SolveOptions opts;
        opts.strategy = Strategy::Bfs;
        opts.max_depth = 1000000;
        opts.max_solutions = 1000000;
        opts.step_budget = static_cast<std::size_t>(-1);
        opts.deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(50);
        auto start = std::chrono::steady_clock::now();
        SolveOutcome o = run(path_program, "path(a,c)", opts);
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(2));
        CHECK(o.budget_hit == BudgetKind::Time);
    }

    TEST_CASE("cyclic binding is pruned, not fatal") {
        // p(X) :- q(X, X); q(Y, f(Y)). makes X = f(X) without an occurs check.
        Program p = parse_program("p(X) :- q(X,X), r(X).\nq(Y,f(Y)).\nr(a).\n");
        SolveOptions opts;
        opts.subst_budget = 32;
        SolveOutcome o = run(p, "p(Z)", opts);
        CHECK(o.solutions.empty());
        CHECK_FALSE(o.exhausted);
        CHECK(o.budget_hit == BudgetKind::Subst);
    }

    TEST_CASE("cyclic answer is flagged") {
        Program p = parse_program("q(Y,f(Y)).\n");
        SolveOptions opts;
        opts.subst_budget = 32;
        SolveOutcome o = run(p, "q(X,X)", opts);
        REQUIRE(o.solutions.size() == 1);
        CHECK(o.solutions[0].cyclic);
    }

    TEST_CASE("invalid options") {
        SolveOptions opts;
        opts.max_depth = 0;
        CHECK_THROWS_AS(run(grandparent_program, "parent(X,Y)", opts), std::invalid_argument);
        CHECK_THROWS_AS(solve(grandparent_program, std::vector<Term>{}), std::invalid_argument);
    }
}

TEST_CASE("strategy names") {
    CHECK(parse_strategy("dfs") == Strategy::Dfs);
    CHECK(parse_strategy("bfs") == Strategy::Bfs);
    CHECK(parse_strategy("iddfs") == Strategy::Iddfs);
    CHECK_FALSE(parse_strategy("best"));
    CHECK(to_string(BudgetKind::MaxDepth) == "max_depth");
    CHECK(to_string(BudgetKind::Steps) == "step_budget");
    CHECK(to_string(BudgetKind::Time) == "time");
}

TEST_CASE("dfs agrees with the bottom-up oracle on the corpus") {
    for (const OracleCase& c : oracle_cases()) {
        CAPTURE(c.query);
        Program p = load_corpus(c.file);
        SolveOptions opts;
        opts.max_depth = 8;
        opts.max_solutions = 10000;
        SolveOutcome o = run(p, c.query, opts);
        REQUIRE(o.exhausted);
        std::set<oracle::Bindings> ours;
        for (const Solution& s : o.solutions) ours.insert(s.binding_map());
        auto model = oracle::least_model(p, c.universe);
        CHECK(ours == oracle::answers(parse_query(c.query), model, c.universe));
        CHECK_FALSE(ours.empty());
    }
}

TEST_CASE("strategies agree whenever dfs is exhausted") {
    for (const OracleCase& c : oracle_cases()) {
        CAPTURE(c.query);
        Program p = load_corpus(c.file);
        SolveOptions opts;
        opts.max_depth = 8;
        opts.max_solutions = 10000;
        SolveOutcome dfs = run(p, c.query, opts);
        REQUIRE(dfs.exhausted);
        for (Strategy s : {Strategy::Bfs, Strategy::Iddfs}) {
            opts.strategy = s;
            SolveOutcome other = run(p, c.query, opts);
            CHECK(other.exhausted);
            CHECK(sorted(binding_list(other)) == sorted(binding_list(dfs)));
        }
    }
}

TEST_CASE("runs are deterministic") {
    Program p = load_corpus("family.pl");
    for (Strategy s : {Strategy::Dfs, Strategy::Bfs, Strategy::Iddfs}) {
        SolveOptions opts;
        opts.strategy = s;
        opts.max_depth = 8;
        SolveOutcome a = run(p, "ancestor(X,Y)", opts);
        SolveOutcome b = run(p, "ancestor(X,Y)", opts);
        REQUIRE(a.solutions.size() == b.solutions.size());
        for (std::size_t i = 0; i < a.solutions.size(); ++i) {
            CHECK(a.solutions[i].bindings == b.solutions[i].bindings);
            REQUIRE(a.solutions[i].trace.size() == b.solutions[i].trace.size());
            for (std::size_t j = 0; j < a.solutions[i].trace.size(); ++j) {
                CHECK(a.solutions[i].trace[j].instance_id == b.solutions[i].trace[j].instance_id);
                CHECK(a.solutions[i].trace[j].goal == b.solutions[i].trace[j].goal);
            }
        }
    }
}

TEST_CASE("stream yields the same solutions as solve") {
    Program p = load_corpus("family.pl");
    SolveOptions opts;
    opts.max_solutions = 100;
    SolveOutcome all = run(p, "ancestor(X,Y)", opts);
    SolutionStream stream(p, parse_query("ancestor(X,Y)"), opts);
    std::size_t n = 0;
    while (auto s = stream.next()) {
        REQUIRE(n < all.solutions.size());
        CHECK(s->bindings == all.solutions[n].bindings);
        ++n;
    }
    CHECK(n == all.solutions.size());
    CHECK(stream.finished());
    CHECK(stream.exhausted() == all.exhausted);
    CHECK_FALSE(stream.next());
    CHECK(stream.steps() > 0);
}

TEST_CASE("iddfs reports each answer once") {
    SolveOptions opts;
    opts.strategy = Strategy::Iddfs;
    opts.max_depth = 8;
    opts.max_solutions = 1000;
    SolveOutcome o = run(load_corpus("family.pl"), "ancestor(X,Y)", opts);
    auto list = binding_list(o);
    std::set<std::map<std::string, Term>> unique(list.begin(), list.end());
    CHECK(unique.size() == list.size());
    CHECK(o.exhausted);
}

TEST_CASE("bfs returns shallow answers first") {
    SolveOptions opts;
    opts.strategy = Strategy::Bfs;
    opts.max_solutions = 4;
    SolveOutcome o = run(load_corpus("peano.pl"), "nat(X)", opts);
    REQUIRE(o.solutions.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(o.solutions[i].binding_map().at("X") == oracle::peano(i));
}

TEST_SUITE("build_tree") {
    TEST_CASE("no goals is a single solution leaf") {
        // A query of `true`-like fact resolves to an empty goal list.
        Program p = parse_program("ok.\n");
        SearchTree tree = build_tree(p, parse_query("ok"));
        REQUIRE(tree.children.size() == 1);
        CHECK(tree.children[0].subtree.kind == SearchTree::Kind::Solution);
        CHECK(tree.children[0].subtree.children.empty());
        CHECK(tree.children[0].subtree.goals.empty());
    }

    TEST_CASE("first solution leaf matches the first solver solution") {
        SearchTree tree = build_tree(grandparent_program, parse_query("grandparent(alice,Q)"));
        const SearchTree* leaf = nullptr;
        auto find = [&](auto&& self, const SearchTree& t) -> void {
            if (leaf) return;
            if (t.kind == SearchTree::Kind::Solution) {
                leaf = &t;
                return;
            }
            for (const auto& c : t.children) self(self, c.subtree);
        };
        find(find, tree);
        REQUIRE(leaf);
        CHECK(apply_subst(leaf->env, T("Q")) == T("carol"));
        CHECK(tree.children.size() == 1);
        CHECK(tree.children[0].instance_id == 3);
        CHECK(tree.children[0].rule == rename_rule(grandparent_program[2], 3));
    }

    TEST_CASE("left recursion truncates at max depth") {
        SolveOptions opts;
        opts.max_depth = 4;
        SearchTree tree = build_tree(path_program, parse_query("path(a,b)"), opts);
        std::size_t truncated = 0;
        bool solution = false;
        auto walk = [&](auto&& self, const SearchTree& t, std::size_t depth) -> void {
            if (t.kind == SearchTree::Kind::Truncated) {
                CHECK(depth == 4);
                ++truncated;
            }
            if (t.kind == SearchTree::Kind::Solution) solution = true;
            for (const auto& c : t.children) self(self, c.subtree, depth + 1);
        };
        walk(walk, tree, 0);
        CHECK(truncated > 0);
        CHECK(solution);
    }
}

TEST_CASE("independent streams can run concurrently") {
    Program p = load_corpus("family.pl");
    std::vector<std::size_t> counts(4);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        threads.emplace_back([&, i] {
            SolveOptions opts;
            opts.max_solutions = 100;
            counts[i] = run(p, "ancestor(X,Y)", opts).solutions.size();
        });
    }
    for (auto& t : threads) t.join();
    for (std::size_t c : counts) CHECK(c == counts[0]);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rgnn/generators.hpp"
#include "rgnn/joins.hpp"
#include "rgnn/state_space.hpp"
#include "rgnn/tensor.hpp"

using namespace rgnn;

namespace {

// Truth-table oracle: direct recursive evaluation with explicit witness
// loops, no bitmaps, no memoization.
bool holds_bf(const JoinFormula& f, const BinaryStructure& s, int u, int v) {
    switch (f.kind) {
    case JoinFormula::Kind::rel: return s.holds(f.relation, u, v);
    case JoinFormula::Kind::neg_rel: return !s.holds(f.relation, u, v);
    case JoinFormula::Kind::conj:
        return holds_bf(*f.left, s, u, v) && holds_bf(*f.right, s, u, v);
    case JoinFormula::Kind::disj:
        return holds_bf(*f.left, s, u, v) || holds_bf(*f.right, s, u, v);
    case JoinFormula::Kind::converse: return holds_bf(*f.left, s, v, u);
    case JoinFormula::Kind::compose:
        for (int w = 0; w < s.n; ++w)
            if (holds_bf(*f.left, s, u, w) && holds_bf(*f.right, s, w, v))
                return true;
        return false;
    }
    return false;
}

JoinPtr random_formula(Rng& rng, const std::vector<std::string>& relations,
                       int depth) {
    using F = JoinFormula;
    const std::string& rel = relations[rng.below(relations.size())];
    if (depth == 0) return rng.below(2) ? F::atom(rel) : F::neg(rel);
    switch (rng.below(5)) {
    case 0: return F::atom(rel);
    case 1: return F::conj(random_formula(rng, relations, depth - 1),
                           random_formula(rng, relations, depth - 1));
    case 2: return F::disj(random_formula(rng, relations, depth - 1),
                           random_formula(rng, relations, depth - 1));
    case 3: return F::compose(random_formula(rng, relations, depth - 1),
                              random_formula(rng, relations, depth - 1));
    default: return F::converse(random_formula(rng, relations, depth - 1));
    }
}

BinaryStructure random_structure(std::uint64_t seed, int n) {
    RelationalState s;
    s.vocab.add("r", 2, PredicateOrigin::domain);
    s.vocab.add("s", 2, PredicateOrigin::domain);
    s.vocab.add("mark", 1, PredicateOrigin::domain);
    Rng rng(seed);
    for (int o = 0; o < n; ++o) s.objects.push_back("o" + std::to_string(o));
    for (int i = 0; i < 2 * n; ++i) {
        const int which = static_cast<int>(rng.below(3));
        Atom atom;
        atom.predicate = which;
        atom.args.push_back(static_cast<ObjectId>(rng.below(static_cast<std::uint64_t>(n))));
        if (which != 2)
            atom.args.push_back(static_cast<ObjectId>(rng.below(static_cast<std::uint64_t>(n))));
        s.atoms.push_back(std::move(atom));
    }
    return to_binary_structure(canonicalize(s));
}

}  // namespace

TEST_CASE("a matching key opens exactly its lock") {
    RelationalState s;
    s.vocab.add("key", 2, PredicateOrigin::domain);
    s.vocab.add("lock", 2, PredicateOrigin::domain);
    s.objects = {"k1", "l1", "l2", "round", "square"};
    s.atoms = {
        Atom{0, {0, 3}},  // key(k1, round)
        Atom{1, {1, 3}},  // lock(l1, round)
        Atom{1, {2, 4}},  // lock(l2, square)
    };
    BinaryStructure structure = to_binary_structure(canonicalize(s));
    // exists s [ key(k, s) and lock(l, s) ]
    JoinPtr can_unlock = JoinFormula::compose(
        JoinFormula::atom("key"), JoinFormula::converse(JoinFormula::atom("lock")));
    auto pairs = evaluate_join(*can_unlock, structure);
    REQUIRE(pairs.size() == 1);
    CHECK(structure.object_names[static_cast<std::size_t>(pairs[0].first)] == "k1");
    CHECK(structure.object_names[static_cast<std::size_t>(pairs[0].second)] == "l1");
}

TEST_CASE("a bare relation atom denotes that relation") {
    BinaryStructure structure = random_structure(5, 4);
    auto pairs = evaluate_join(*JoinFormula::atom("r"), structure);
    for (int u = 0; u < structure.n; ++u)
        for (int v = 0; v < structure.n; ++v) {
            const bool in = std::find(pairs.begin(), pairs.end(),
                                      std::make_pair(u, v)) != pairs.end();
            CHECK(in == structure.holds("r", u, v));
        }
}

TEST_CASE("unary predicates land on the diagonal") {
    BinaryStructure structure = random_structure(8, 5);
    auto pairs = evaluate_join(*JoinFormula::atom("mark"), structure);
    for (const auto& [u, v] : pairs) CHECK(u == v);
}

TEST_CASE("the evaluator agrees with quantifier expansion on random formulas") {
    Rng rng(99);
    const std::vector<std::string> relations{"r", "s", "mark"};
    for (int trial = 0; trial < 120; ++trial) {
        BinaryStructure structure =
            random_structure(1000 + static_cast<std::uint64_t>(trial),
                             2 + static_cast<int>(rng.below(5)));
        JoinPtr f = random_formula(rng, relations, 3);
        auto bitmap = evaluate_join_bitmap(*f, structure);
        for (int u = 0; u < structure.n; ++u)
            for (int v = 0; v < structure.n; ++v)
                CHECK(static_cast<bool>(
                          bitmap[static_cast<std::size_t>(u * structure.n + v)]) ==
                      holds_bf(*f, structure, u, v));
    }
}

TEST_CASE("unknown relations are reported") {
    BinaryStructure structure = random_structure(3, 3);
    CHECK_THROWS_AS(evaluate_join(*JoinFormula::atom("ghost"), structure),
                    UnknownRelationError);
}

TEST_CASE("dist_0 holds exactly at the goal cell") {
    Instance inst = parse_generated(gen_navig_xy(3, 3, 0.0, 2));
    StateSpace space = expand(inst.domain, inst.init);
    std::vector<int> vstar = optimal_values(space);
    for (std::size_t i = 0; i < space.size(); ++i) {
        BinaryStructure structure =
            to_binary_structure(augment_goal(space.states[i]));
        CHECK(navig_dist_holds(structure, 0) == (vstar[i] == 0));
    }
}

TEST_CASE("a corridor end is at formula distance two") {
    DomainModel domain = parse_domain(domain_pddl("navig-xy"));
    const char* problem = R"((define (problem p) (:domain navig-xy)
      (:objects x1 x2 x3 - xcoord y1 - ycoord)
      (:init (succ-x x1 x2) (succ-x x2 x3)
             (cell x1 y1) (cell x2 y1) (cell x3 y1)
             (at x3 y1))
      (:goal (at x1 y1))))";
    RelationalState init = parse_problem(problem, domain);
    BinaryStructure structure = to_binary_structure(augment_goal(init));
    CHECK(!navig_dist_holds(structure, 0));
    CHECK(!navig_dist_holds(structure, 1));
    CHECK(navig_dist_holds(structure, 2));
    CHECK(navig_min_dist(structure, 10) == 2);
}

TEST_CASE("blocked cells never satisfy the distance formula") {
    DomainModel domain = parse_domain(domain_pddl("navig-xy"));
    const char* problem = R"((define (problem p) (:domain navig-xy)
      (:objects x1 x2 x3 - xcoord y1 - ycoord)
      (:init (succ-x x1 x2) (succ-x x2 x3)
             (cell x1 y1) (cell x3 y1)
             (blocked x2 y1)
             (at x3 y1))
      (:goal (at x1 y1))))";
    RelationalState init = parse_problem(problem, domain);
    BinaryStructure structure = to_binary_structure(augment_goal(init));
    const int x2 = 1, y1 = 3;  // canonical object order: x1 x2 x3 y1
    for (int k = 1; k <= 8; ++k) {
        auto bitmap = evaluate_join_bitmap(*navig_phi(k), structure);
        CHECK(!bitmap[static_cast<std::size_t>(x2 * structure.n + y1)]);
    }
}

TEST_CASE("the formula distance equals V* across navig state spaces") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Instance inst = parse_generated(gen_navig_xy(3, 3, 0.25, seed));
        StateSpace space = expand(inst.domain, inst.init);
        std::vector<int> vstar = optimal_values(space);
        for (std::size_t i = 0; i < space.size(); ++i) {
            BinaryStructure structure =
                to_binary_structure(augment_goal(space.states[i]));
            const int cap = static_cast<int>(space.size()) + 2;
            const int by_formula = navig_min_dist(structure, cap);
            if (vstar[i] == kInfiniteValue)
                CHECK(by_formula == -1);
            else
                CHECK(by_formula == vstar[i]);
        }
    }
}

TEST_CASE("suggested parameters report depth and subformula counts") {
    using F = JoinFormula;
    JoinPtr simple = F::atom("r");
    JoinPtr one = F::compose(F::atom("r"), F::atom("s"));
    JoinPtr two = F::conj(F::neg("r"), F::compose(one, F::atom("s")));

    SuggestedParams p = suggest_parameters({simple, one, two});
    CHECK(p.t == 2);  // nested compositions in `two`
    CHECK(p.l == 7);  // conj + neg + atom + compose + (compose + atom + atom)
    CHECK(p.k == 1 + 3 + 7);
}

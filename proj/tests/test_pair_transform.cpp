#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "rgnn/generators.hpp"
#include "rgnn/pair_transform.hpp"
#include "rgnn/state_space.hpp"
#include "rgnn/tensor.hpp"

using namespace rgnn;

namespace {

// Brute-force R_t straight from the definition: nested loops over atom
// argument pairs, then explicit composition sweeps.
std::set<std::pair<ObjectId, ObjectId>> rt_oracle(const RelationalState& s,
                                                  int t, bool cumulative) {
    std::set<std::pair<ObjectId, ObjectId>> r1;
    for (const Atom& atom : s.atoms)
        for (ObjectId a : atom.args)
            for (ObjectId b : atom.args) r1.insert({a, b});
    std::set<std::pair<ObjectId, ObjectId>> level = r1, acc = r1;
    for (int i = 2; i <= t; ++i) {
        std::set<std::pair<ObjectId, ObjectId>> next;
        for (auto [a, b] : level)
            for (auto [c, d] : level)
                if (b == c) next.insert({a, d});
        level = next;
        if (cumulative)
            acc.insert(level.begin(), level.end());
        else
            acc = level;
    }
    return acc;
}

std::size_t composable_pair_count(
    const std::set<std::pair<ObjectId, ObjectId>>& r) {
    std::size_t count = 0;
    for (auto [a, b] : r)
        for (auto [c, d] : r)
            if (b == c) ++count;
    return count;
}

RelationalState chain_state() {
    RelationalState s;
    s.vocab.add("p", 2, PredicateOrigin::domain);
    s.objects = {"a", "b", "c", "d"};
    s.atoms = {Atom{0, {0, 1}}, Atom{0, {1, 2}}};
    return canonicalize(s);
}

RelationalState random_state(std::uint64_t seed, int objects, int atoms) {
    RelationalState s;
    s.vocab.add("p", 2, PredicateOrigin::domain);
    s.vocab.add("q", 3, PredicateOrigin::domain);
    s.vocab.add("u", 1, PredicateOrigin::domain);
    Rng rng(seed);
    for (int o = 0; o < objects; ++o) s.objects.push_back("o" + std::to_string(o));
    for (int i = 0; i < atoms; ++i) {
        const int which = static_cast<int>(rng.below(3));
        Atom atom;
        atom.predicate = which;
        const int arity = which == 0 ? 2 : (which == 1 ? 3 : 1);
        for (int a = 0; a < arity; ++a)
            atom.args.push_back(static_cast<ObjectId>(rng.below(
                static_cast<std::uint64_t>(objects))));
        s.atoms.push_back(std::move(atom));
    }
    return canonicalize(s);
}

}  // namespace

TEST_CASE("square tuple is row-major over the argument pairs") {
    auto pairs = square_tuple({0, 1});
    REQUIRE(pairs.size() == 4);
    CHECK(pairs[0] == PairObject{0, 0});
    CHECK(pairs[1] == PairObject{0, 1});
    CHECK(pairs[2] == PairObject{1, 0});
    CHECK(pairs[3] == PairObject{1, 1});

    CHECK(square_tuple({3}) == std::vector<PairObject>{PairObject{3, 3}});

    auto nine = square_tuple({7, 1, 4});  // (r, x, y)
    REQUIRE(nine.size() == 9);
    CHECK(nine[2] == PairObject{7, 4});  // position 2 is (r, y)

    CHECK_THROWS_AS(square_tuple({}), EmptyTupleError);
}

TEST_CASE("a0 lifts a binary atom to its four pairs") {
    RelationalState s;
    s.vocab.add("at", 2, PredicateOrigin::domain);
    s.objects = {"x1", "y2"};
    s.atoms = {Atom{0, {0, 1}}};
    TransformedState ts = a0_transform(canonicalize(s));
    REQUIRE(ts.atoms.size() == 1);
    CHECK(transformed_to_text(ts) == "at(x1:x1,x1:y2,y2:x1,y2:y2)");
    CHECK(ts.vocab.at(ts.atoms[0].predicate).arity == 4);
}

TEST_CASE("a0 of an empty state has no atoms but keeps the diagonals") {
    RelationalState s;
    s.objects = {"a", "b"};
    TransformedState ts = a0_transform(s);
    CHECK(ts.atoms.empty());
    CHECK(ts.pairs.size() == 2);
    CHECK(ts.pair_index(PairObject{0, 0}) >= 0);
    CHECK(ts.pair_index(PairObject{1, 1}) >= 0);
}

TEST_CASE("a ternary atom lifts to arity nine") {
    Instance inst = parse_generated(gen_vacuum(4, 1, 3));
    RelationalState s = add_obj_atoms(augment_goal(inst.init));
    TransformedState ts = a0_transform(s);
    const PredicateId adjacent = ts.vocab.id("adjacent");
    CHECK(ts.vocab.at(adjacent).arity == 9);
    bool found = false;
    for (const PairAtom& atom : ts.atoms)
        if (atom.predicate == adjacent) {
            found = true;
            CHECK(atom.args.size() == 9);
        }
    CHECK(found);
}

TEST_CASE("the lifted atom count always matches the source atom count") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RelationalState s = random_state(seed, 5, 8);
        TransformedState ts = a0_transform(s);
        CHECK(ts.atoms.size() == s.atoms.size());
        for (const PairAtom& atom : ts.atoms) {
            const int arity = ts.vocab.at(atom.predicate).arity;
            const int root = arity == 1 ? 1 : (arity == 4 ? 2 : 3);
            CHECK(root * root == arity);
        }
    }
}

TEST_CASE("R1 contains every ordered co-occurrence pair") {
    RelationalState s;
    s.vocab.add("p", 2, PredicateOrigin::domain);
    s.objects = {"a", "b"};
    s.atoms = {Atom{0, {0, 1}}};
    auto r1 = compute_rt(canonicalize(s), 1);
    std::set<PairObject> set(r1.begin(), r1.end());
    CHECK(set.count(PairObject{0, 0}));
    CHECK(set.count(PairObject{0, 1}));
    CHECK(set.count(PairObject{1, 0}));
    CHECK(set.count(PairObject{1, 1}));
}

TEST_CASE("R1 of an atomless state is empty") {
    RelationalState s;
    s.objects = {"a", "b"};
    CHECK(compute_rt(s, 1).empty());
}

TEST_CASE("composition reaches across a chain at t=2") {
    RelationalState s = chain_state();
    auto r2 = compute_rt(s, 2);
    std::set<PairObject> set(r2.begin(), r2.end());
    CHECK(set.count(PairObject{0, 2}));  // (a, c) via b
}

TEST_CASE("compute_rt matches the brute-force definition") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        RelationalState s = random_state(seed, 6, 7);
        for (int t = 1; t <= 3; ++t) {
            for (bool cumulative : {false, true}) {
                auto fast = compute_rt(s, t, cumulative);
                auto slow = rt_oracle(s, t, cumulative);
                REQUIRE(fast.size() == slow.size());
                for (const PairObject& p : fast)
                    CHECK(slow.count({p.first, p.second}));
            }
        }
    }
}

TEST_CASE("delta atoms join composable pairs") {
    std::vector<PairObject> r{{0, 1}, {1, 2}};
    auto triangles = delta_atoms(r);
    bool found = false;
    for (const auto& tri : triangles)
        if (tri[0] == PairObject{0, 1} && tri[1] == PairObject{1, 2} &&
            tri[2] == PairObject{0, 2})
            found = true;
    CHECK(found);

    CHECK(delta_atoms({}).empty());

    auto degenerate = delta_atoms({{3, 3}});
    REQUIRE(degenerate.size() == 1);
    CHECK(degenerate[0][0] == PairObject{3, 3});
    CHECK(degenerate[0][1] == PairObject{3, 3});
    CHECK(degenerate[0][2] == PairObject{3, 3});
}

TEST_CASE("t=0 transform is exactly a0") {
    RelationalState s = random_state(3, 5, 6);
    TransformedState t0 = at_transform(s, 0);
    TransformedState a0 = a0_transform(s);
    CHECK(transformed_to_text(t0) == transformed_to_text(a0));
}

TEST_CASE("navig states get the neighbor-communication triangles") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.0, 7));
    RelationalState s = add_obj_atoms(augment_goal(inst.init));
    TransformedState ts = at_transform(s, 1);
    const PredicateId delta = ts.vocab.id(kDeltaPredicate);

    // look for a triangle ((x,y),(y,y'),(x,y')) linking vertical neighbors
    const int x1 = 0;  // objects are sorted: x1 x2 y1 y2
    const int y1 = 2, y2 = 3;
    bool found = false;
    for (const PairAtom& atom : ts.atoms) {
        if (atom.predicate != delta) continue;
        const PairObject a = ts.pairs[static_cast<std::size_t>(atom.args[0])];
        const PairObject b = ts.pairs[static_cast<std::size_t>(atom.args[1])];
        const PairObject c = ts.pairs[static_cast<std::size_t>(atom.args[2])];
        if (a == PairObject{x1, y1} && b == PairObject{y1, y2} &&
            c == PairObject{x1, y2})
            found = true;
    }
    CHECK(found);
}

TEST_CASE("t=2 adds triangles that t=1 lacks on a chain") {
    RelationalState s = chain_state();
    TransformedState t1 = at_transform(s, 1);
    TransformedState t2 = at_transform(s, 2);

    auto triangle_texts = [](const TransformedState& ts) {
        std::set<std::string> out;
        const PredicateId delta = ts.vocab.id(kDeltaPredicate);
        for (const PairAtom& atom : ts.atoms) {
            if (atom.predicate != delta) continue;
            out.insert(ts.pair_name(atom.args[0]) + "|" +
                       ts.pair_name(atom.args[1]) + "|" +
                       ts.pair_name(atom.args[2]));
        }
        return out;
    };
    auto d1 = triangle_texts(t1);
    auto d2 = triangle_texts(t2);
    // brute force: (a,c) in R_2 composes with (c,c); absent from R_1 triangles
    CHECK(d2.count("a:c|c:c|a:c"));
    CHECK(!d1.count("a:c|c:c|a:c"));
}

TEST_CASE("every emitted triangle satisfies the endpoint shape") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RelationalState s = random_state(seed, 6, 8);
        TransformedState ts = at_transform(s, 1);
        const PredicateId delta =
            ts.vocab.contains(kDeltaPredicate) ? ts.vocab.id(kDeltaPredicate) : -1;
        for (const PairAtom& atom : ts.atoms) {
            for (int arg : atom.args) {
                const PairObject p = ts.pairs[static_cast<std::size_t>(arg)];
                CHECK(p.first >= 0);
                CHECK(p.first < static_cast<ObjectId>(s.objects.size()));
                CHECK(p.second >= 0);
                CHECK(p.second < static_cast<ObjectId>(s.objects.size()));
            }
            if (atom.predicate != delta) continue;
            const PairObject a = ts.pairs[static_cast<std::size_t>(atom.args[0])];
            const PairObject b = ts.pairs[static_cast<std::size_t>(atom.args[1])];
            const PairObject c = ts.pairs[static_cast<std::size_t>(atom.args[2])];
            CHECK(a.second == b.first);
            CHECK(c.first == a.first);
            CHECK(c.second == b.second);
        }
    }
}

TEST_CASE("triangle counts match the brute-force composable count") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RelationalState s = random_state(seed, 8, 9);
        TransformedState ts = at_transform(s, 1);
        std::size_t triangles = 0;
        if (ts.vocab.contains(kDeltaPredicate)) {
            const PredicateId delta = ts.vocab.id(kDeltaPredicate);
            for (const PairAtom& atom : ts.atoms)
                if (atom.predicate == delta) ++triangles;
        }
        CHECK(triangles == composable_pair_count(rt_oracle(s, 1, false)));
    }
}

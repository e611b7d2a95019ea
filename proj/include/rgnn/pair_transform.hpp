#pragma once

#include <array>
#include <string>
#include <vector>

#include "rgnn/core.hpp"

namespace rgnn {

struct PairObject {
    ObjectId first = 0;
    ObjectId second = 0;

    bool diagonal() const { return first == second; }
    friend auto operator<=>(const PairObject&, const PairObject&) = default;
};

struct PairAtom {
    PredicateId predicate = -1;
    std::vector<int> args;  // indices into TransformedState::pairs

    friend auto operator<=>(const PairAtom&, const PairAtom&) = default;
};

// State lifted to pair objects: atoms of A_t(S) plus the pair universe they
// mention. All diagonal pairs <o,o> are present regardless of mention, since
// the readout sums over them.
struct TransformedState {
    Vocabulary vocab;  // lifted predicates, @delta when t >= 1
    std::vector<std::string> object_names;
    std::vector<PairObject> pairs;  // sorted
    std::vector<PairAtom> atoms;    // sorted by (predicate name, args)
    int t = 0;

    int pair_index(PairObject pair) const;  // -1 when absent
    std::string pair_name(int index) const;
};

// <w>^2 in row-major order: (o1,o1), (o1,o2), ..., (om,om).
std::vector<PairObject> square_tuple(const std::vector<ObjectId>& tuple);

// Lifts every atom p(w) to p(<w>^2); arity m becomes m^2.
TransformedState a0_transform(const RelationalState& state);

// R_1: ordered pairs of objects co-occurring in some atom (reflexive pairs
// included). R_t for t > 1 composes R_{t-1} with itself; lower levels are
// unioned in only when `cumulative` is set.
std::vector<PairObject> compute_rt(const RelationalState& state, int t,
                                   bool cumulative = false);

// One triangle per composable ordered pair of R-edges, degenerate ones
// included: (<o,o'>, <o',o''>) -> (<o,o'>, <o',o''>, <o,o''>).
std::vector<std::array<PairObject, 3>> delta_atoms(
    const std::vector<PairObject>& rt);

// A_0(S) for t = 0; A_0(S) plus the triangle atoms of Delta_t(S) for t >= 1.
TransformedState at_transform(const RelationalState& state, int t,
                              bool cumulative = false);

// Lifts the state and attaches an explicit triangle set (used both by
// at_transform and by the full-triangulation baseline input).
TransformedState assemble_transform(
    const RelationalState& state,
    const std::vector<std::array<PairObject, 3>>& triangles, int t_label);

std::string transformed_to_text(const TransformedState& ts);

}  // namespace rgnn

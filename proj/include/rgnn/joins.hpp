#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rgnn/core.hpp"

namespace rgnn {

// Binary-relation formulas over free variables {x, y}: (negated) relation
// atoms closed under conjunction, disjunction, the composition quantifier
// exists z [phi(x,z) and psi(z,y)], and argument transposition.
struct JoinFormula;
using JoinPtr = std::shared_ptr<const JoinFormula>;

struct JoinFormula {
    enum class Kind { rel, neg_rel, conj, disj, compose, converse };

    Kind kind = Kind::rel;
    std::string relation;  // rel / neg_rel
    JoinPtr left;
    JoinPtr right;  // unused for converse

    static JoinPtr atom(std::string relation);
    static JoinPtr neg(std::string relation);
    static JoinPtr conj(JoinPtr a, JoinPtr b);
    static JoinPtr disj(JoinPtr a, JoinPtr b);
    static JoinPtr compose(JoinPtr a, JoinPtr b);
    static JoinPtr converse(JoinPtr a);
};

std::string to_text(const JoinFormula& formula);

// Finite structure of binary relations (unary predicates lifted onto the
// diagonal; predicates of arity > 2 are not representable and are skipped).
struct BinaryStructure {
    int n = 0;
    std::vector<std::string> object_names;
    std::map<std::string, std::vector<char>> relations;  // n*n bitmaps

    bool holds(const std::string& relation, int a, int b) const;
};

BinaryStructure to_binary_structure(const RelationalState& state);

// Denotation A^phi = {(u, v) : A |= phi(u, v)}, bottom-up with memoization.
std::vector<std::pair<int, int>> evaluate_join(const JoinFormula& formula,
                                               const BinaryStructure& structure);
std::vector<char> evaluate_join_bitmap(const JoinFormula& formula,
                                       const BinaryStructure& structure);

// Navig-xy distance formulas: phi_0 = at_g, adjacency from the successor
// relations, and the guarded step recurrence. Requires relations
// at, at_g, blocked, succ-x, succ-y.
JoinPtr navig_phi(int k);
// Dist_k: exists x,y [at(x,y) and phi_k(x,y)].
bool navig_dist_holds(const BinaryStructure& structure, int k);
// Smallest k <= cap with Dist_k true, or -1.
int navig_min_dist(const BinaryStructure& structure, int cap);

struct SuggestedParams {
    int t = 0;  // max composition nesting depth
    int k = 0;  // total subformula count
    int l = 0;  // max subformula count
};

// Reported sizing for a finite join collection; a heuristic report only.
SuggestedParams suggest_parameters(const std::vector<JoinPtr>& joins);

}  // namespace rgnn

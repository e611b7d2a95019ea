#include "rgnn/joins.hpp"

#include <algorithm>
#include <unordered_map>

namespace rgnn {

JoinPtr JoinFormula::atom(std::string relation) {
    auto f = std::make_shared<JoinFormula>();
    f->kind = Kind::rel;
    f->relation = std::move(relation);
    return f;
}

JoinPtr JoinFormula::neg(std::string relation) {
    auto f = std::make_shared<JoinFormula>();
    f->kind = Kind::neg_rel;
    f->relation = std::move(relation);
    return f;
}

namespace {

JoinPtr binary(JoinFormula::Kind kind, JoinPtr a, JoinPtr b) {
    auto f = std::make_shared<JoinFormula>();
    f->kind = kind;
    f->left = std::move(a);
    f->right = std::move(b);
    return f;
}

}  // namespace

JoinPtr JoinFormula::conj(JoinPtr a, JoinPtr b) {
    return binary(Kind::conj, std::move(a), std::move(b));
}

JoinPtr JoinFormula::disj(JoinPtr a, JoinPtr b) {
    return binary(Kind::disj, std::move(a), std::move(b));
}

JoinPtr JoinFormula::compose(JoinPtr a, JoinPtr b) {
    return binary(Kind::compose, std::move(a), std::move(b));
}

JoinPtr JoinFormula::converse(JoinPtr a) {
    auto f = std::make_shared<JoinFormula>();
    f->kind = Kind::converse;
    f->left = std::move(a);
    return f;
}

std::string to_text(const JoinFormula& formula) {
    switch (formula.kind) {
    case JoinFormula::Kind::rel: return formula.relation + "(x,y)";
    case JoinFormula::Kind::neg_rel: return "!" + formula.relation + "(x,y)";
    case JoinFormula::Kind::conj:
        return "(" + to_text(*formula.left) + " & " + to_text(*formula.right) + ")";
    case JoinFormula::Kind::disj:
        return "(" + to_text(*formula.left) + " | " + to_text(*formula.right) + ")";
    case JoinFormula::Kind::compose:
        return "Ez(" + to_text(*formula.left) + " ; " + to_text(*formula.right) + ")";
    case JoinFormula::Kind::converse:
        return "~" + to_text(*formula.left);
    }
    return "?";
}

bool BinaryStructure::holds(const std::string& relation, int a, int b) const {
    auto it = relations.find(relation);
    if (it == relations.end())
        throw UnknownRelationError("unknown relation: " + relation);
    return it->second[static_cast<std::size_t>(a * n + b)] != 0;
}

BinaryStructure to_binary_structure(const RelationalState& state) {
    BinaryStructure s;
    s.n = static_cast<int>(state.objects.size());
    s.object_names = state.objects;
    const std::size_t cells = static_cast<std::size_t>(s.n) *
                              static_cast<std::size_t>(s.n);
    for (const Predicate& p : state.vocab.predicates())
        if (p.arity == 1 || p.arity == 2)
            s.relations.emplace(p.name, std::vector<char>(cells, 0));
    for (const Atom& atom : state.atoms) {
        const Predicate& p = state.vocab.at(atom.predicate);
        if (p.arity < 1 || p.arity > 2) continue;
        const int a = atom.args[0];
        const int b = p.arity == 2 ? atom.args[1] : atom.args[0];
        s.relations[p.name][static_cast<std::size_t>(a * s.n + b)] = 1;
    }
    return s;
}

namespace {

using Bitmap = std::vector<char>;

const Bitmap& eval_memo(const JoinFormula& f, const BinaryStructure& structure,
                        std::unordered_map<const JoinFormula*, Bitmap>& memo) {
    auto it = memo.find(&f);
    if (it != memo.end()) return it->second;

    const int n = structure.n;
    const std::size_t cells = static_cast<std::size_t>(n) *
                              static_cast<std::size_t>(n);
    Bitmap out(cells, 0);
    switch (f.kind) {
    case JoinFormula::Kind::rel: {
        auto rel = structure.relations.find(f.relation);
        if (rel == structure.relations.end())
            throw UnknownRelationError("unknown relation: " + f.relation);
        out = rel->second;
        break;
    }
    case JoinFormula::Kind::neg_rel: {
        auto rel = structure.relations.find(f.relation);
        if (rel == structure.relations.end())
            throw UnknownRelationError("unknown relation: " + f.relation);
        for (std::size_t i = 0; i < cells; ++i) out[i] = rel->second[i] ? 0 : 1;
        break;
    }
    case JoinFormula::Kind::conj: {
        const Bitmap& a = eval_memo(*f.left, structure, memo);
        const Bitmap& b = eval_memo(*f.right, structure, memo);
        for (std::size_t i = 0; i < cells; ++i) out[i] = a[i] && b[i];
        break;
    }
    case JoinFormula::Kind::disj: {
        const Bitmap& a = eval_memo(*f.left, structure, memo);
        const Bitmap& b = eval_memo(*f.right, structure, memo);
        for (std::size_t i = 0; i < cells; ++i) out[i] = a[i] || b[i];
        break;
    }
    case JoinFormula::Kind::compose: {
        const Bitmap& a = eval_memo(*f.left, structure, memo);
        const Bitmap& b = eval_memo(*f.right, structure, memo);
        for (int u = 0; u < n; ++u)
            for (int w = 0; w < n; ++w) {
                if (!a[static_cast<std::size_t>(u * n + w)]) continue;
                for (int v = 0; v < n; ++v)
                    if (b[static_cast<std::size_t>(w * n + v)])
                        out[static_cast<std::size_t>(u * n + v)] = 1;
            }
        break;
    }
    case JoinFormula::Kind::converse: {
        const Bitmap& a = eval_memo(*f.left, structure, memo);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                out[static_cast<std::size_t>(u * n + v)] =
                    a[static_cast<std::size_t>(v * n + u)];
        break;
    }
    }
    return memo.emplace(&f, std::move(out)).first->second;
}

}  // namespace

std::vector<char> evaluate_join_bitmap(const JoinFormula& formula,
                                       const BinaryStructure& structure) {
    std::unordered_map<const JoinFormula*, Bitmap> memo;
    return eval_memo(formula, structure, memo);
}

std::vector<std::pair<int, int>> evaluate_join(const JoinFormula& formula,
                                               const BinaryStructure& structure) {
    Bitmap bitmap = evaluate_join_bitmap(formula, structure);
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < structure.n; ++u)
        for (int v = 0; v < structure.n; ++v)
            if (bitmap[static_cast<std::size_t>(u * structure.n + v)])
                pairs.emplace_back(u, v);
    return pairs;
}

JoinPtr navig_phi(int k) {
    using F = JoinFormula;
    JoinPtr succ_x = F::atom("succ-x");
    JoinPtr succ_y = F::atom("succ-y");
    JoinPtr adj_x = F::disj(succ_x, F::converse(succ_x));
    JoinPtr adj_y = F::disj(succ_y, F::converse(succ_y));
    JoinPtr phi = F::atom(goal_copy_name("at"));
    for (int level = 0; level < k; ++level) {
        // cell (x,y) one step from a level-k cell, moving along x or y
        JoinPtr step_x = F::compose(adj_x, phi);
        JoinPtr step_y = F::compose(phi, F::converse(adj_y));
        phi = F::conj(F::neg("blocked"), F::disj(step_x, step_y));
    }
    return phi;
}

bool navig_dist_holds(const BinaryStructure& structure, int k) {
    JoinPtr witness = JoinFormula::conj(JoinFormula::atom("at"), navig_phi(k));
    Bitmap bitmap = evaluate_join_bitmap(*witness, structure);
    for (char c : bitmap)
        if (c) return true;
    return false;
}

int navig_min_dist(const BinaryStructure& structure, int cap) {
    for (int k = 0; k <= cap; ++k)
        if (navig_dist_holds(structure, k)) return k;
    return -1;
}

namespace {

int compose_depth(const JoinFormula& f) {
    switch (f.kind) {
    case JoinFormula::Kind::rel:
    case JoinFormula::Kind::neg_rel: return 0;
    case JoinFormula::Kind::converse: return compose_depth(*f.left);
    case JoinFormula::Kind::compose:
        return 1 + std::max(compose_depth(*f.left), compose_depth(*f.right));
    default:
        return std::max(compose_depth(*f.left), compose_depth(*f.right));
    }
}

int subformula_count(const JoinFormula& f) {
    switch (f.kind) {
    case JoinFormula::Kind::rel:
    case JoinFormula::Kind::neg_rel: return 1;
    case JoinFormula::Kind::converse: return 1 + subformula_count(*f.left);
    default:
        return 1 + subformula_count(*f.left) + subformula_count(*f.right);
    }
}

}  // namespace

SuggestedParams suggest_parameters(const std::vector<JoinPtr>& joins) {
    SuggestedParams p;
    for (const JoinPtr& j : joins) {
        p.t = std::max(p.t, compose_depth(*j));
        const int count = subformula_count(*j);
        p.k += count;
        p.l = std::max(p.l, count);
    }
    return p;
}

}  // namespace rgnn

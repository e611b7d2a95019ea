#include "rgnn/baselines.hpp"

#include <algorithm>

namespace rgnn {

namespace {

void check_pairable_vocab(const RelationalState& state) {
    for (const Predicate& p : state.vocab.predicates()) {
        if (p.origin != PredicateOrigin::domain &&
            p.origin != PredicateOrigin::goal_copy)
            continue;
        if (p.arity > 2)
            throw ArityTooHighError("unsuitable domain: ternary predicates (" +
                                    p.name + "/" + std::to_string(p.arity) + ")");
    }
}

}  // namespace

TwoGnnMarks two_gnn_marks(const RelationalState& augmented) {
    check_pairable_vocab(augmented);
    const int n = static_cast<int>(augmented.objects.size());

    TwoGnnMarks out;
    std::map<std::string, int> slot_of;
    for (PredicateId id : augmented.vocab.ids_by_name()) {
        const Predicate& p = augmented.vocab.at(id);
        if (p.arity < 1 || p.arity > 2) continue;
        slot_of[p.name] = static_cast<int>(out.mark_vocab.size());
        out.mark_vocab.push_back(p.name);
    }

    out.marks.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), {});
    for (const Atom& atom : augmented.atoms) {
        const Predicate& p = augmented.vocab.at(atom.predicate);
        if (p.arity == 0)
            throw EmptyTupleError("arity-0 atom has no pair to mark: " + p.name);
        auto it = slot_of.find(p.name);
        if (it == slot_of.end()) continue;
        const ObjectId a = atom.args[0];
        const ObjectId b = p.arity == 2 ? atom.args[1] : atom.args[0];
        out.marks[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(b)].push_back(it->second);
    }
    for (auto& row : out.marks) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return out;
}

Tensor initial_pair_embeddings(const RelationalState& state,
                               const PairEmbeddingVocab& vocab) {
    RelationalState augmented = augment_goal(state);
    TwoGnnMarks marks = two_gnn_marks(augmented);
    const std::size_t n = augmented.objects.size();
    Tensor out = Tensor::zeros(n * n, static_cast<std::size_t>(vocab.dim));
    for (std::size_t node = 0; node < marks.marks.size(); ++node) {
        for (int slot : marks.marks[node]) {
            auto it = vocab.vectors.find(marks.mark_vocab[static_cast<std::size_t>(slot)]);
            if (it == vocab.vectors.end())
                throw UnknownPredicateError("no pair embedding vector for " +
                                            marks.mark_vocab[static_cast<std::size_t>(slot)]);
            const Tensor& vec = it->second;
            if (vec.size() != static_cast<std::size_t>(vocab.dim))
                throw ShapeMismatchError("pair embedding vector has wrong size");
            for (std::size_t c = 0; c < vec.size(); ++c)
                out.values[node * static_cast<std::size_t>(vocab.dim) + c] +=
                    vec.values[c];
        }
    }
    return out;
}

NetworkInput build_2gnn_input(const RelationalState& augmented,
                              const Vocabulary& net_vocab,
                              std::size_t max_objects) {
    const std::size_t n = augmented.objects.size();
    if (n > max_objects)
        throw SizeCapError("2-GNN input needs " + std::to_string(2 * n * n * n) +
                           " atoms over " + std::to_string(n) +
                           " objects, above the configured cap");

    NetworkInput input;
    input.num_objects = static_cast<int>(n);
    input.num_nodes = static_cast<int>(n * n);
    auto node = [&](std::size_t a, std::size_t b) {
        return static_cast<int>(a * n + b);
    };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            input.node_names.push_back(augmented.objects[a] + ":" +
                                       augmented.objects[b]);

    const PredicateId p1 = net_vocab.id(kTwoGnnLeft);
    const PredicateId p2 = net_vocab.id(kTwoGnnRight);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t w = 0; w < n; ++w) {
                input.atoms.push_back(InputAtom{p1, {node(w, v), node(u, v)}});
                input.atoms.push_back(InputAtom{p2, {node(u, w), node(u, v)}});
            }

    input.diagonal_of.resize(n);
    for (std::size_t o = 0; o < n; ++o) {
        input.diagonal_of[o] = node(o, o);
        input.readout_nodes.push_back(node(o, o));
    }
    TwoGnnMarks marks = two_gnn_marks(augmented);
    input.init_marks = std::move(marks.marks);
    input.mark_vocab = std::move(marks.mark_vocab);
    return input;
}

TransformedState build_rgnn2_input(const RelationalState& augmented_with_obj,
                                   std::size_t max_objects) {
    const std::size_t n = augmented_with_obj.objects.size();
    if (n > max_objects)
        throw SizeCapError("full triangulation needs " +
                           std::to_string(n * n * n) + " atoms over " +
                           std::to_string(n) + " objects, above the cap");
    std::vector<std::array<PairObject, 3>> triangles;
    triangles.reserve(n * n * n);
    for (ObjectId a = 0; a < static_cast<ObjectId>(n); ++a)
        for (ObjectId b = 0; b < static_cast<ObjectId>(n); ++b)
            for (ObjectId c = 0; c < static_cast<ObjectId>(n); ++c)
                triangles.push_back({PairObject{a, b}, PairObject{b, c},
                                     PairObject{a, c}});
    return assemble_transform(augmented_with_obj, triangles, -1);
}

}  // namespace rgnn

#include "rgnn/pair_transform.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rgnn {

int TransformedState::pair_index(PairObject pair) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), pair);
    if (it == pairs.end() || *it != pair) return -1;
    return static_cast<int>(it - pairs.begin());
}

std::string TransformedState::pair_name(int index) const {
    const PairObject& p = pairs.at(static_cast<std::size_t>(index));
    return object_names.at(static_cast<std::size_t>(p.first)) + ":" +
           object_names.at(static_cast<std::size_t>(p.second));
}

std::vector<PairObject> square_tuple(const std::vector<ObjectId>& tuple) {
    if (tuple.empty())
        throw EmptyTupleError("cannot lift an arity-0 atom to pairs");
    std::vector<PairObject> pairs;
    pairs.reserve(tuple.size() * tuple.size());
    for (ObjectId a : tuple)
        for (ObjectId b : tuple) pairs.push_back(PairObject{a, b});
    return pairs;
}

namespace {

struct TransformBuilder {
    const RelationalState& state;
    std::set<PairObject> mentioned;
    std::vector<std::pair<PredicateId, std::vector<PairObject>>> raw_atoms;

    explicit TransformBuilder(const RelationalState& s) : state(s) {}

    void add_lifted_atoms() {
        for (const Atom& atom : state.atoms) {
            std::vector<PairObject> lifted = square_tuple(atom.args);
            mentioned.insert(lifted.begin(), lifted.end());
            raw_atoms.emplace_back(atom.predicate, std::move(lifted));
        }
    }

    TransformedState finish(int t, const Vocabulary& lifted_vocab,
                            PredicateId delta_id,
                            const std::vector<std::array<PairObject, 3>>& triangles) {
        TransformedState ts;
        ts.t = t;
        ts.vocab = lifted_vocab;
        ts.object_names = state.objects;
        for (const auto& tri : triangles)
            for (const PairObject& p : tri) mentioned.insert(p);
        for (ObjectId o = 0; o < static_cast<ObjectId>(state.objects.size()); ++o)
            mentioned.insert(PairObject{o, o});
        ts.pairs.assign(mentioned.begin(), mentioned.end());

        auto index_of = [&](PairObject p) {
            return static_cast<int>(std::lower_bound(ts.pairs.begin(),
                                                     ts.pairs.end(), p) -
                                    ts.pairs.begin());
        };
        for (const auto& [pred, pair_args] : raw_atoms) {
            PairAtom atom;
            atom.predicate = pred;
            for (const PairObject& p : pair_args) atom.args.push_back(index_of(p));
            ts.atoms.push_back(std::move(atom));
        }
        for (const auto& tri : triangles) {
            PairAtom atom;
            atom.predicate = delta_id;
            for (const PairObject& p : tri) atom.args.push_back(index_of(p));
            ts.atoms.push_back(std::move(atom));
        }
        std::sort(ts.atoms.begin(), ts.atoms.end(),
                  [&](const PairAtom& a, const PairAtom& b) {
                      const std::string& na = ts.vocab.at(a.predicate).name;
                      const std::string& nb = ts.vocab.at(b.predicate).name;
                      if (na != nb) return na < nb;
                      return a.args < b.args;
                  });
        ts.atoms.erase(std::unique(ts.atoms.begin(), ts.atoms.end()),
                       ts.atoms.end());
        return ts;
    }
};

Vocabulary lift_vocabulary(const Vocabulary& base, bool with_delta,
                           PredicateId* delta_id) {
    Vocabulary lifted;
    for (const Predicate& p : base.predicates()) {
        const int arity = p.arity == 0 ? 0 : p.arity * p.arity;
        PredicateOrigin origin = p.origin == PredicateOrigin::static_obj
                                     ? PredicateOrigin::static_obj
                                     : PredicateOrigin::pair_lift;
        lifted.add(p.name, arity, origin);
    }
    if (with_delta)
        *delta_id = lifted.ensure(kDeltaPredicate, 3, PredicateOrigin::triangle);
    return lifted;
}

}  // namespace

TransformedState a0_transform(const RelationalState& state) {
    TransformBuilder builder(state);
    builder.add_lifted_atoms();
    Vocabulary lifted = lift_vocabulary(state.vocab, false, nullptr);
    return builder.finish(0, lifted, -1, {});
}

std::vector<PairObject> compute_rt(const RelationalState& state, int t,
                                   bool cumulative) {
    if (t < 1) throw Error("compute_rt requires t >= 1");
    std::set<PairObject> r1;
    for (const Atom& atom : state.atoms)
        for (ObjectId a : atom.args)
            for (ObjectId b : atom.args) r1.insert(PairObject{a, b});

    std::set<PairObject> current = r1;
    std::set<PairObject> result = r1;
    for (int level = 2; level <= t; ++level) {
        // successors of each middle object under the current relation
        std::map<ObjectId, std::vector<ObjectId>> outgoing;
        for (const PairObject& p : current) outgoing[p.first].push_back(p.second);
        std::set<PairObject> next;
        for (const PairObject& p : current) {
            auto it = outgoing.find(p.second);
            if (it == outgoing.end()) continue;
            for (ObjectId target : it->second)
                next.insert(PairObject{p.first, target});
        }
        current = std::move(next);
        if (cumulative)
            result.insert(current.begin(), current.end());
        else
            result = current;
    }
    return std::vector<PairObject>(result.begin(), result.end());
}

std::vector<std::array<PairObject, 3>> delta_atoms(
    const std::vector<PairObject>& rt) {
    std::map<ObjectId, std::vector<PairObject>> by_first;
    for (const PairObject& p : rt) by_first[p.first].push_back(p);
    std::vector<std::array<PairObject, 3>> triangles;
    for (const PairObject& left : rt) {
        auto it = by_first.find(left.second);
        if (it == by_first.end()) continue;
        for (const PairObject& right : it->second)
            triangles.push_back({left, right,
                                 PairObject{left.first, right.second}});
    }
    std::sort(triangles.begin(), triangles.end());
    triangles.erase(std::unique(triangles.begin(), triangles.end()),
                    triangles.end());
    return triangles;
}

TransformedState assemble_transform(
    const RelationalState& state,
    const std::vector<std::array<PairObject, 3>>& triangles, int t_label) {
    TransformBuilder builder(state);
    builder.add_lifted_atoms();
    PredicateId delta_id = -1;
    const bool with_delta = t_label != 0 || !triangles.empty();
    Vocabulary lifted = lift_vocabulary(state.vocab, with_delta, &delta_id);
    return builder.finish(t_label, lifted, delta_id, triangles);
}

TransformedState at_transform(const RelationalState& state, int t,
                              bool cumulative) {
    if (t < 0) throw Error("at_transform requires t >= 0");
    std::vector<std::array<PairObject, 3>> triangles;
    if (t >= 1) triangles = delta_atoms(compute_rt(state, t, cumulative));
    return assemble_transform(state, triangles, t);
}

std::string transformed_to_text(const TransformedState& ts) {
    std::string text;
    for (std::size_t i = 0; i < ts.atoms.size(); ++i) {
        if (i) text += ' ';
        const PairAtom& atom = ts.atoms[i];
        text += ts.vocab.at(atom.predicate).name;
        text += '(';
        for (std::size_t j = 0; j < atom.args.size(); ++j) {
            if (j) text += ',';
            text += ts.pair_name(atom.args[j]);
        }
        text += ')';
    }
    return text;
}

}  // namespace rgnn

#include "rgnn/core.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace rgnn {

SyntaxError::SyntaxError(const std::string& what, int line, int column)
    : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"
                     : what),
      line(line),
      column(column) {}

const char* to_string(PredicateOrigin origin) {
    switch (origin) {
    case PredicateOrigin::domain: return "domain";
    case PredicateOrigin::goal_copy: return "goal-copy";
    case PredicateOrigin::static_obj: return "static-obj";
    case PredicateOrigin::triangle: return "triangle";
    case PredicateOrigin::pair_lift: return "pair-lift";
    case PredicateOrigin::baseline_aux: return "baseline-aux";
    }
    return "domain";
}

PredicateOrigin origin_from_string(const std::string& text) {
    if (text == "domain") return PredicateOrigin::domain;
    if (text == "goal-copy") return PredicateOrigin::goal_copy;
    if (text == "static-obj") return PredicateOrigin::static_obj;
    if (text == "triangle") return PredicateOrigin::triangle;
    if (text == "pair-lift") return PredicateOrigin::pair_lift;
    if (text == "baseline-aux") return PredicateOrigin::baseline_aux;
    throw Error("unknown predicate origin: " + text);
}

PredicateId add_impl(std::vector<Predicate>& predicates,
                     std::map<std::string, PredicateId>& index,
                     std::string name, int arity, PredicateOrigin origin) {
    if (name.empty())
        throw VocabularyError("predicate name must not be empty");
    if (arity < 0)
        throw VocabularyError("negative arity for predicate " + name);
    if (index.count(name))
        throw VocabularyError("duplicate predicate name: " + name);
    PredicateId id = static_cast<PredicateId>(predicates.size());
    index.emplace(name, id);
    predicates.push_back(Predicate{std::move(name), arity, origin});
    return id;
}

PredicateId Vocabulary::add(std::string name, int arity, PredicateOrigin origin) {
    return add_impl(predicates_, index_, std::move(name), arity, origin);
}

PredicateId Vocabulary::ensure(const std::string& name, int arity,
                               PredicateOrigin origin) {
    auto it = index_.find(name);
    if (it != index_.end()) {
        const Predicate& existing = predicates_[it->second];
        if (existing.arity != arity || existing.origin != origin)
            throw VocabularyError("predicate " + name +
                                  " already declared with a different signature");
        return it->second;
    }
    return add_impl(predicates_, index_, name, arity, origin);
}

bool Vocabulary::contains(const std::string& name) const {
    return index_.count(name) > 0;
}

PredicateId Vocabulary::id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw UnknownPredicateError("unknown predicate: " + name);
    return it->second;
}

const Predicate& Vocabulary::at(PredicateId id) const {
    if (id < 0 || id >= size())
        throw UnknownPredicateError("predicate id out of range: " +
                                    std::to_string(id));
    return predicates_[static_cast<std::size_t>(id)];
}

std::vector<PredicateId> Vocabulary::ids_by_name() const {
    std::vector<PredicateId> ids;
    ids.reserve(index_.size());
    for (const auto& [name, id] : index_) ids.push_back(id);
    return ids;
}

std::string goal_copy_name(const std::string& predicate) {
    return predicate + kGoalSuffix;
}

namespace {

void check_atom_args(const RelationalState& state, const Atom& atom) {
    for (ObjectId arg : atom.args) {
        if (arg < 0 || arg >= static_cast<ObjectId>(state.objects.size()))
            throw UnknownObjectError("atom argument outside object universe");
    }
}

}  // namespace

RelationalState augment_goal(const RelationalState& state) {
    RelationalState out = state;
    for (const Atom& g : state.goal) {
        const Predicate& source = state.vocab.at(g.predicate);
        if (source.origin != PredicateOrigin::domain)
            throw VocabularyError("goal atom over non-domain predicate: " +
                                  source.name);
        PredicateId copy = out.vocab.ensure(goal_copy_name(source.name),
                                            source.arity,
                                            PredicateOrigin::goal_copy);
        out.atoms.push_back(Atom{copy, g.args});
    }
    return canonicalize(out);
}

RelationalState add_obj_atoms(const RelationalState& state) {
    RelationalState out = state;
    PredicateId obj =
        out.vocab.ensure(kObjPredicate, 1, PredicateOrigin::static_obj);
    for (ObjectId o = 0; o < static_cast<ObjectId>(state.objects.size()); ++o)
        out.atoms.push_back(Atom{obj, {o}});
    return canonicalize(out);
}

bool atom_less_by_name(const Vocabulary& vocab, const Atom& a, const Atom& b) {
    const std::string& na = vocab.at(a.predicate).name;
    const std::string& nb = vocab.at(b.predicate).name;
    if (na != nb) return na < nb;
    return a.args < b.args;
}

RelationalState canonicalize(const RelationalState& state) {
    RelationalState out;
    out.vocab = state.vocab;

    const std::size_t n = state.objects.size();
    std::vector<ObjectId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](ObjectId a, ObjectId b) {
        return state.objects[static_cast<std::size_t>(a)] <
               state.objects[static_cast<std::size_t>(b)];
    });
    std::vector<ObjectId> remap(n);
    out.objects.resize(n);
    if (!state.object_types.empty()) out.object_types.resize(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        ObjectId old_id = order[pos];
        remap[static_cast<std::size_t>(old_id)] = static_cast<ObjectId>(pos);
        out.objects[pos] = state.objects[static_cast<std::size_t>(old_id)];
        if (!state.object_types.empty())
            out.object_types[pos] = state.object_types[static_cast<std::size_t>(old_id)];
    }

    auto rewrite = [&](const std::vector<Atom>& atoms) {
        std::vector<Atom> result;
        result.reserve(atoms.size());
        for (const Atom& atom : atoms) {
            check_atom_args(state, atom);
            Atom copy = atom;
            for (ObjectId& arg : copy.args)
                arg = remap[static_cast<std::size_t>(arg)];
            result.push_back(std::move(copy));
        }
        std::sort(result.begin(), result.end(),
                  [&](const Atom& a, const Atom& b) {
                      return atom_less_by_name(out.vocab, a, b);
                  });
        result.erase(std::unique(result.begin(), result.end()), result.end());
        return result;
    };
    out.atoms = rewrite(state.atoms);
    out.goal = rewrite(state.goal);
    return out;
}

std::string atom_to_text(const Vocabulary& vocab,
                         const std::vector<std::string>& objects,
                         const Atom& atom) {
    std::string text = vocab.at(atom.predicate).name;
    text += '(';
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i) text += ',';
        text += objects.at(static_cast<std::size_t>(atom.args[i]));
    }
    text += ')';
    return text;
}

Atom atom_from_text(const Vocabulary& vocab,
                    const std::map<std::string, ObjectId>& objects,
                    const std::string& text) {
    auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw Error("malformed atom text: " + text);
    Atom atom;
    atom.predicate = vocab.id(text.substr(0, open));
    std::string args = text.substr(open + 1, text.size() - open - 2);
    if (!args.empty()) {
        std::stringstream stream(args);
        std::string part;
        while (std::getline(stream, part, ',')) {
            auto it = objects.find(part);
            if (it == objects.end())
                throw UnknownObjectError("unknown object in atom text: " + part);
            atom.args.push_back(it->second);
        }
    }
    const Predicate& pred = vocab.at(atom.predicate);
    if (static_cast<int>(atom.args.size()) != pred.arity)
        throw ArityMismatchError("atom " + text + " has " +
                                 std::to_string(atom.args.size()) +
                                 " args, predicate " + pred.name + " expects " +
                                 std::to_string(pred.arity));
    return atom;
}

std::string state_to_text(const RelationalState& state) {
    std::string text;
    for (std::size_t i = 0; i < state.atoms.size(); ++i) {
        if (i) text += ' ';
        text += atom_to_text(state.vocab, state.objects, state.atoms[i]);
    }
    return text;
}

std::string state_key(const RelationalState& state) {
    std::string key;
    key.reserve(state.atoms.size() * 8);
    for (const Atom& atom : state.atoms) {
        key += std::to_string(atom.predicate);
        for (ObjectId arg : atom.args) {
            key += ',';
            key += std::to_string(arg);
        }
        key += ';';
    }
    return key;
}

bool is_goal_state(const RelationalState& state) {
    std::set<Atom> have(state.atoms.begin(), state.atoms.end());
    for (const Atom& g : state.goal)
        if (!have.count(g)) return false;
    return true;
}

namespace {

std::set<std::string> atom_texts(const RelationalState& state,
                                 const std::vector<Atom>& atoms) {
    std::set<std::string> texts;
    for (const Atom& atom : atoms)
        texts.insert(atom_to_text(state.vocab, state.objects, atom));
    return texts;
}

}  // namespace

bool same_state(const RelationalState& a, const RelationalState& b) {
    std::set<std::string> oa(a.objects.begin(), a.objects.end());
    std::set<std::string> ob(b.objects.begin(), b.objects.end());
    if (oa != ob) return false;
    return atom_texts(a, a.atoms) == atom_texts(b, b.atoms) &&
           atom_texts(a, a.goal) == atom_texts(b, b.goal);
}

}  // namespace rgnn

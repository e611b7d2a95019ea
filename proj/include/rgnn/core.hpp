#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgnn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, int line = 0, int column = 0);
    int line;
    int column;
};

class UnsupportedFeatureError : public Error {
public:
    using Error::Error;
};

class ArityMismatchError : public Error {
public:
    using Error::Error;
};

class UnknownPredicateError : public Error {
public:
    using Error::Error;
};

class UnknownObjectError : public Error {
public:
    using Error::Error;
};

class UnknownRelationError : public Error {
public:
    using Error::Error;
};

class VocabularyError : public Error {
public:
    using Error::Error;
};

class EmptyTupleError : public Error {
public:
    using Error::Error;
};

class CapExceededError : public Error {
public:
    using Error::Error;
};

class SizeCapError : public Error {
public:
    using Error::Error;
};

class EmptySpaceError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class MissingDiagonalError : public Error {
public:
    using Error::Error;
};

class ArityTooHighError : public Error {
public:
    using Error::Error;
};

class InfiniteLabelError : public Error {
public:
    using Error::Error;
};

class UniverseMismatchError : public Error {
public:
    using Error::Error;
};

class UnsatisfiableError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

using ObjectId = std::int32_t;
using PredicateId = std::int32_t;

enum class PredicateOrigin {
    domain,
    goal_copy,
    static_obj,
    triangle,
    pair_lift,
    baseline_aux,
};

const char* to_string(PredicateOrigin origin);
PredicateOrigin origin_from_string(const std::string& text);

struct Predicate {
    std::string name;
    int arity = 0;
    PredicateOrigin origin = PredicateOrigin::domain;
};

// Predicate symbols with unique names; ids are stable positions in
// declaration order.
class Vocabulary {
public:
    PredicateId add(std::string name, int arity, PredicateOrigin origin);
    // Returns the existing id when an identical predicate is present,
    // throws VocabularyError when the name is taken with another signature.
    PredicateId ensure(const std::string& name, int arity, PredicateOrigin origin);
    bool contains(const std::string& name) const;
    PredicateId id(const std::string& name) const;
    const Predicate& at(PredicateId id) const;
    int size() const { return static_cast<int>(predicates_.size()); }
    const std::vector<Predicate>& predicates() const { return predicates_; }
    std::vector<PredicateId> ids_by_name() const;

private:
    std::vector<Predicate> predicates_;
    std::map<std::string, PredicateId> index_;
};

struct Atom {
    PredicateId predicate = -1;
    std::vector<ObjectId> args;

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

// Ground planning state: object universe O, true atoms S, goal atoms G.
// Immutable by convention; all operations below return fresh states.
struct RelationalState {
    Vocabulary vocab;
    std::vector<std::string> objects;       // ObjectId -> name
    std::vector<std::string> object_types;  // empty for untyped instances
    std::vector<Atom> atoms;                // S
    std::vector<Atom> goal;                 // G
};

inline const std::string kObjPredicate = "@obj";
inline const std::string kDeltaPredicate = "@delta";
inline const std::string kGoalSuffix = "_g";

std::string goal_copy_name(const std::string& predicate);

// Adds one p_g(o...) atom to S for every p(o...) in G. G itself is unchanged.
RelationalState augment_goal(const RelationalState& state);

// Adds one @obj(o) atom per object.
RelationalState add_obj_atoms(const RelationalState& state);

// Sorts objects by name (re-indexing atoms accordingly), sorts and
// deduplicates S and G by (predicate name, args). Two states that are equal
// as sets render identically after this.
RelationalState canonicalize(const RelationalState& state);

bool atom_less_by_name(const Vocabulary& vocab, const Atom& a, const Atom& b);
std::string atom_to_text(const Vocabulary& vocab,
                         const std::vector<std::string>& objects,
                         const Atom& atom);
Atom atom_from_text(const Vocabulary& vocab,
                    const std::map<std::string, ObjectId>& objects,
                    const std::string& text);

// One-line rendering of the atom list; canonical states render canonically.
std::string state_to_text(const RelationalState& state);

// Compact id-based key for dedup/visited sets. Only meaningful between
// states that share one object table and vocabulary.
std::string state_key(const RelationalState& state);

bool is_goal_state(const RelationalState& state);

// Set-semantics comparison via names (works across vocabularies).
bool same_state(const RelationalState& a, const RelationalState& b);

}  // namespace rgnn

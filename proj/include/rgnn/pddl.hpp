#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rgnn/core.hpp"

namespace rgnn {

struct TypedVar {
    std::string name;  // includes the leading '?'
    std::string type;  // "object" when untyped
};

struct AtomTemplate {
    PredicateId predicate = -1;
    std::vector<int> params;  // indices into ActionSchema::params
};

struct ActionSchema {
    std::string name;
    std::vector<TypedVar> params;
    std::vector<AtomTemplate> precond;
    std::vector<AtomTemplate> add;
    std::vector<AtomTemplate> del;
};

// Parsed STRIPS domain: predicate vocabulary, type tree, action schemas.
struct DomainModel {
    std::string name;
    Vocabulary vocab;
    std::vector<std::pair<std::string, std::string>> types;  // type -> parent
    std::vector<ActionSchema> schemas;                       // sorted by name

    bool has_type(const std::string& name) const;
    bool is_subtype(const std::string& type, const std::string& ancestor) const;
};

struct GroundAction {
    std::string name;  // "(pick b1 rooma left)"
    std::vector<Atom> precond;  // sorted
    std::vector<Atom> add;
    std::vector<Atom> del;

    bool applicable(const RelationalState& state) const;
};

// Supported subset: :strips with optional :typing, positive preconditions,
// conjunctive add/delete effects. Everything else raises
// UnsupportedFeatureError.
DomainModel parse_domain(std::string_view text);

// Returns the canonicalized initial state (objects sorted by name).
RelationalState parse_problem(std::string_view text, const DomainModel& domain);

struct Instance {
    std::string id;
    DomainModel domain;
    RelationalState init;
};

Instance parse_instance_files(const std::string& domain_path,
                              const std::string& problem_path);
Instance parse_instance_text(std::string_view domain_text,
                             std::string_view problem_text,
                             const std::string& id);

// Naive grounding over all type-respecting bindings, deterministic order.
// Bindings whose add and delete sets overlap are dropped.
std::vector<GroundAction> ground(const DomainModel& domain,
                                 const RelationalState& state);

RelationalState apply(const RelationalState& state, const GroundAction& action);

struct Successor {
    int action = -1;  // index into the ground action list
    RelationalState state;
};

// Applicable transitions with canonicalized, deduplicated successor states.
std::vector<Successor> successors(const RelationalState& state,
                                  const std::vector<GroundAction>& actions);

}  // namespace rgnn

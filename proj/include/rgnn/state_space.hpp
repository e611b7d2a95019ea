#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rgnn/pddl.hpp"

namespace rgnn {

inline constexpr int kInfiniteValue = std::numeric_limits<int>::max();

// Complete reachable transition graph of one instance. Index 0 is the
// initial state; edges have unit cost.
struct StateSpace {
    std::vector<RelationalState> states;
    std::vector<std::vector<int>> succ;  // successor state indices
    std::vector<char> goal_flag;
    std::vector<GroundAction> actions;
    int initial = 0;

    std::size_t size() const { return states.size(); }
};

StateSpace expand(const DomainModel& domain, const RelationalState& init,
                  std::size_t cap = 200000);

// Distance to the nearest goal state (backward BFS from all goals);
// kInfiniteValue marks dead ends.
std::vector<int> optimal_values(const StateSpace& space);

struct LabeledState {
    std::string instance_id;
    RelationalState state;
    int vstar = 0;
};

struct ExpandedInstance {
    std::string id;
    StateSpace space;
    std::vector<int> vstar;
};

// Stratified sample: round-robin over distinct V* values, uniform within a
// stratum, at most per_value_cap states per value. Dead ends are skipped
// unless included with a finite surrogate value.
std::vector<LabeledState> sample_training_set(
    const std::vector<ExpandedInstance>& instances, int per_value_cap,
    std::uint64_t seed, bool include_dead_ends = false,
    int dead_end_surrogate = 1000);

// Line-delimited text dataset; states are written goal-augmented so the
// record's atom list carries the goal via the *_g predicates.
void write_dataset(std::ostream& out, const std::string& domain_name,
                   const std::vector<LabeledState>& states);

struct Dataset {
    std::string domain_name;
    Vocabulary vocab;
    std::vector<LabeledState> states;
};

Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);
void write_dataset_file(const std::string& path, const std::string& domain_name,
                        const std::vector<LabeledState>& states);

}  // namespace rgnn

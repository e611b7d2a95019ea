#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgnn/pddl.hpp"

namespace rgnn {

struct GeneratedInstance {
    std::string id;
    std::string domain_text;
    std::string problem_text;
};

inline const std::vector<std::string> kGeneratorDomains = {
    "navig-xy", "visitall-xy", "visitall", "gripper",
    "blocks-s", "blocks-m",    "vacuum"};

// Fixed domain file for each built-in generator.
std::string domain_pddl(const std::string& domain_name);

// Every generator emits a solvable instance (verified by expanding it and
// checking V* of the initial state) and retries the random draw up to
// `retries` times before giving up with UnsatisfiableError.

GeneratedInstance gen_navig_xy(int n, int m, double obstacle_density,
                               std::uint64_t seed, int retries = 100);
GeneratedInstance gen_visitall_xy(int n, int m, int targets, std::uint64_t seed,
                                  int retries = 100);
GeneratedInstance gen_visitall(int n, int m, int targets, std::uint64_t seed,
                               int retries = 100);
GeneratedInstance gen_gripper(int balls, std::uint64_t seed, int retries = 100);
GeneratedInstance gen_blocks(bool single_tower, int blocks, std::uint64_t seed,
                             int retries = 100);
GeneratedInstance gen_vacuum(int locations, int robots, std::uint64_t seed,
                             int retries = 100);

GeneratedInstance generate(const std::string& domain_name, int n, int m,
                           double density, int targets, int count_param,
                           std::uint64_t seed);

Instance parse_generated(const GeneratedInstance& generated);

// Locations a robot can reach from the dirty location in exactly k hops of
// its own traversal map: P_0(x) = dirty(x), P_k(x) = exists y
// [adjacent(r,x,y) and P_{k-1}(y)].
std::vector<char> vacuum_reach_set(const RelationalState& state, ObjectId robot,
                                   int k);
bool vacuum_reachable(const RelationalState& state, ObjectId robot,
                      ObjectId location, int k);
// min over robots of min{k : P_k(r, at(r))}, or -1 when no robot connects.
int vacuum_best_distance(const RelationalState& state, int cap);

}  // namespace rgnn

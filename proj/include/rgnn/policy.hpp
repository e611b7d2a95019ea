#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rgnn/state_space.hpp"

namespace rgnn {

using ValueFn = std::function<double(const RelationalState&)>;

struct EvalRecord {
    std::string instance_id;
    bool solved = false;
    int steps = 0;
    std::optional<int> optimal;  // V* of the initial state when computed
    std::string termination;     // goal | step-cap | dead-end
};

// Greedy execution: move to the unvisited successor with the lowest value,
// ties broken by canonical state order (or shuffled under tie_seed).
EvalRecord run_policy(const DomainModel& domain, const RelationalState& init,
                      const ValueFn& value, int step_cap = 1000,
                      std::optional<std::uint64_t> tie_seed = std::nullopt,
                      const std::string& instance_id = "");

struct SuiteSummary {
    int solved = 0;
    int total = 0;
    long long total_length = 0;  // over solved instances
    double median_length = 0.0;
    double mean_length = 0.0;

    double coverage() const {
        return total == 0 ? 0.0 : static_cast<double>(solved) / total;
    }
};

SuiteSummary summarize(const std::vector<EvalRecord>& records);

// Runs the policy on every instance; oracle_cap > 0 additionally expands
// each instance (if it fits) to record V* of the initial state.
SuiteSummary evaluate_suite(const std::vector<Instance>& instances,
                            const ValueFn& value, int step_cap,
                            std::vector<EvalRecord>* records_out = nullptr,
                            int threads = 1, std::size_t oracle_cap = 0);

void write_records_csv(std::ostream& out, const std::vector<EvalRecord>& records);

}  // namespace rgnn

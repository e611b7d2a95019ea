#include "rgnn/policy.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <thread>

#include "rgnn/tensor.hpp"

namespace rgnn {

EvalRecord run_policy(const DomainModel& domain, const RelationalState& init,
                      const ValueFn& value, int step_cap,
                      std::optional<std::uint64_t> tie_seed,
                      const std::string& instance_id) {
    EvalRecord record;
    record.instance_id = instance_id;

    std::vector<GroundAction> actions = ground(domain, init);
    RelationalState current = canonicalize(init);
    std::set<std::string> visited;
    visited.insert(state_key(current));

    std::optional<Rng> rng;
    if (tie_seed) rng.emplace(*tie_seed);

    for (;;) {
        if (is_goal_state(current)) {
            record.solved = true;
            record.termination = "goal";
            return record;
        }
        if (record.steps >= step_cap) {
            record.termination = "step-cap";
            return record;
        }
        std::vector<Successor> next = successors(current, actions);
        std::vector<Successor> fresh;
        for (Successor& s : next)
            if (!visited.count(state_key(s.state))) fresh.push_back(std::move(s));
        if (fresh.empty()) {
            record.termination = "dead-end";
            return record;
        }
        if (rng) rng->shuffle(fresh);

        std::size_t best = 0;
        double best_value = value(fresh[0].state);
        for (std::size_t i = 1; i < fresh.size(); ++i) {
            const double v = value(fresh[i].state);
            if (v < best_value) {
                best_value = v;
                best = i;
            }
        }
        current = std::move(fresh[best].state);
        visited.insert(state_key(current));
        ++record.steps;
    }
}

SuiteSummary summarize(const std::vector<EvalRecord>& records) {
    SuiteSummary s;
    s.total = static_cast<int>(records.size());
    std::vector<int> lengths;
    for (const EvalRecord& r : records) {
        if (!r.solved) continue;
        ++s.solved;
        s.total_length += r.steps;
        lengths.push_back(r.steps);
    }
    if (!lengths.empty()) {
        std::sort(lengths.begin(), lengths.end());
        const std::size_t mid = lengths.size() / 2;
        s.median_length = lengths.size() % 2 == 1
                              ? lengths[mid]
                              : (lengths[mid - 1] + lengths[mid]) / 2.0;
        s.mean_length = static_cast<double>(s.total_length) /
                        static_cast<double>(lengths.size());
    }
    return s;
}

SuiteSummary evaluate_suite(const std::vector<Instance>& instances,
                            const ValueFn& value, int step_cap,
                            std::vector<EvalRecord>* records_out, int threads,
                            std::size_t oracle_cap) {
    std::vector<EvalRecord> records(instances.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < instances.size(); i += stride) {
            const Instance& inst = instances[i];
            records[i] = run_policy(inst.domain, inst.init, value, step_cap,
                                    std::nullopt, inst.id);
            if (oracle_cap > 0) {
                try {
                    StateSpace space = expand(inst.domain, inst.init, oracle_cap);
                    std::vector<int> vstar = optimal_values(space);
                    if (vstar[0] != kInfiniteValue) records[i].optimal = vstar[0];
                } catch (const CapExceededError&) {
                    // instance too large to expand; leave optimal unset
                }
            }
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        const int workers =
            std::min<int>(threads, static_cast<int>(instances.size()));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, static_cast<std::size_t>(w),
                              static_cast<std::size_t>(workers));
        for (auto& th : pool) th.join();
    }
    if (records_out) *records_out = records;
    return summarize(records);
}

void write_records_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
    out << "instance,solved,steps,vstar_initial,termination\n";
    for (const EvalRecord& r : records) {
        out << r.instance_id << "," << (r.solved ? 1 : 0) << "," << r.steps << ",";
        if (r.optimal) out << *r.optimal;
        out << "," << r.termination << "\n";
    }
}

}  // namespace rgnn

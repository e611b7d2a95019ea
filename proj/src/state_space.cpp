#include "rgnn/state_space.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "rgnn/tensor.hpp"

namespace rgnn {

StateSpace expand(const DomainModel& domain, const RelationalState& init,
                  std::size_t cap) {
    StateSpace space;
    space.actions = ground(domain, init);

    RelationalState start = canonicalize(init);
    std::unordered_map<std::string, int> index;
    index.emplace(state_key(start), 0);
    space.states.push_back(std::move(start));
    space.succ.emplace_back();
    space.goal_flag.push_back(is_goal_state(space.states[0]) ? 1 : 0);

    std::deque<int> frontier{0};
    while (!frontier.empty()) {
        const int current = frontier.front();
        frontier.pop_front();
        // space.states may reallocate while expanding, take successors first
        std::vector<Successor> next = successors(space.states[static_cast<std::size_t>(current)],
                                                 space.actions);
        for (Successor& s : next) {
            std::string key = state_key(s.state);
            auto it = index.find(key);
            int target;
            if (it != index.end()) {
                target = it->second;
            } else {
                if (space.states.size() >= cap)
                    throw CapExceededError(
                        "state space exceeds cap of " + std::to_string(cap) +
                        " states");
                target = static_cast<int>(space.states.size());
                index.emplace(std::move(key), target);
                space.goal_flag.push_back(is_goal_state(s.state) ? 1 : 0);
                space.states.push_back(std::move(s.state));
                space.succ.emplace_back();
                frontier.push_back(target);
            }
            space.succ[static_cast<std::size_t>(current)].push_back(target);
        }
    }
    return space;
}

std::vector<int> optimal_values(const StateSpace& space) {
    const std::size_t n = space.size();
    std::vector<std::vector<int>> pred(n);
    for (std::size_t s = 0; s < n; ++s)
        for (int t : space.succ[s]) pred[static_cast<std::size_t>(t)].push_back(static_cast<int>(s));

    std::vector<int> value(n, kInfiniteValue);
    std::deque<int> queue;
    for (std::size_t s = 0; s < n; ++s) {
        if (space.goal_flag[s]) {
            value[s] = 0;
            queue.push_back(static_cast<int>(s));
        }
    }
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (int p : pred[static_cast<std::size_t>(s)]) {
            if (value[static_cast<std::size_t>(p)] != kInfiniteValue) continue;
            value[static_cast<std::size_t>(p)] = value[static_cast<std::size_t>(s)] + 1;
            queue.push_back(p);
        }
    }
    return value;
}

std::vector<LabeledState> sample_training_set(
    const std::vector<ExpandedInstance>& instances, int per_value_cap,
    std::uint64_t seed, bool include_dead_ends, int dead_end_surrogate) {
    // strata keyed by V*, each entry (instance index, state index)
    std::map<int, std::vector<std::pair<int, int>>> strata;
    bool any_state = false;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const ExpandedInstance& inst = instances[i];
        if (inst.vstar.size() != inst.space.size())
            throw Error("optimal values not computed for instance " + inst.id);
        for (std::size_t s = 0; s < inst.space.size(); ++s) {
            any_state = true;
            int v = inst.vstar[s];
            if (v == kInfiniteValue) {
                if (!include_dead_ends) continue;
                v = dead_end_surrogate;
            }
            strata[v].emplace_back(static_cast<int>(i), static_cast<int>(s));
        }
    }
    if (!any_state) throw EmptySpaceError("no states to sample from");

    Rng rng(seed);
    for (auto& [v, bucket] : strata) rng.shuffle(bucket);

    std::vector<LabeledState> out;
    if (per_value_cap <= 0) return out;
    for (int round = 0; round < per_value_cap; ++round) {
        bool took = false;
        for (auto& [v, bucket] : strata) {
            if (round >= static_cast<int>(bucket.size())) continue;
            auto [inst_idx, state_idx] = bucket[static_cast<std::size_t>(round)];
            const ExpandedInstance& inst = instances[static_cast<std::size_t>(inst_idx)];
            out.push_back(LabeledState{inst.id,
                                       inst.space.states[static_cast<std::size_t>(state_idx)],
                                       v});
            took = true;
        }
        if (!took) break;
    }
    return out;
}

namespace {

const char* kDatasetHeader = "# rgnn-dataset 1";

}  // namespace

void write_dataset(std::ostream& out, const std::string& domain_name,
                   const std::vector<LabeledState>& states) {
    // collect the union vocabulary of the augmented states
    Vocabulary vocab;
    std::vector<RelationalState> augmented;
    augmented.reserve(states.size());
    for (const LabeledState& ls : states)
        augmented.push_back(augment_goal(ls.state));
    for (const RelationalState& s : augmented)
        for (const Predicate& p : s.vocab.predicates())
            vocab.ensure(p.name, p.arity, p.origin);

    out << kDatasetHeader << "\n";
    out << "# domain " << domain_name << "\n";
    for (PredicateId id : vocab.ids_by_name()) {
        const Predicate& p = vocab.at(id);
        out << "# predicate " << p.name << " " << p.arity << " "
            << to_string(p.origin) << "\n";
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        const LabeledState& ls = states[i];
        const RelationalState& s = augmented[i];
        out << ls.instance_id << "\t";
        if (ls.vstar == kInfiniteValue)
            out << "inf";
        else
            out << ls.vstar;
        out << "\t";
        for (std::size_t o = 0; o < s.objects.size(); ++o) {
            if (o) out << ",";
            out << s.objects[o];
        }
        out << "\t" << state_to_text(s) << "\n";
    }
}

Dataset read_dataset(std::istream& in) {
    Dataset ds;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ss(line.substr(1));
            std::string word;
            ss >> word;
            if (word == "rgnn-dataset") {
                saw_header = true;
            } else if (word == "domain") {
                ss >> ds.domain_name;
            } else if (word == "predicate") {
                std::string name, origin;
                int arity;
                if (!(ss >> name >> arity >> origin))
                    throw IoError("malformed predicate line: " + line);
                ds.vocab.ensure(name, arity, origin_from_string(origin));
            }
            continue;
        }
        if (!saw_header) throw IoError("missing dataset header line");
        std::stringstream ss(line);
        std::string id, vstar_text, objects_text, atoms_text;
        if (!std::getline(ss, id, '\t') || !std::getline(ss, vstar_text, '\t') ||
            !std::getline(ss, objects_text, '\t'))
            throw IoError("malformed dataset record: " + line);
        std::getline(ss, atoms_text);

        LabeledState ls;
        ls.instance_id = id;
        ls.vstar = vstar_text == "inf" ? kInfiniteValue : std::stoi(vstar_text);
        ls.state.vocab = ds.vocab;
        std::map<std::string, ObjectId> object_ids;
        {
            std::stringstream os(objects_text);
            std::string obj;
            while (std::getline(os, obj, ',')) {
                if (obj.empty()) continue;
                object_ids[obj] = static_cast<ObjectId>(ls.state.objects.size());
                ls.state.objects.push_back(obj);
            }
        }
        {
            std::stringstream as(atoms_text);
            std::string atom;
            while (as >> atom)
                ls.state.atoms.push_back(
                    atom_from_text(ls.state.vocab, object_ids, atom));
        }
        ls.state = canonicalize(ls.state);
        ds.states.push_back(std::move(ls));
    }
    if (!saw_header) throw IoError("not a dataset file");
    return ds;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    return read_dataset(in);
}

void write_dataset_file(const std::string& path, const std::string& domain_name,
                        const std::vector<LabeledState>& states) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset: " + path);
    write_dataset(out, domain_name, states);
}

}  // namespace rgnn

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rgnn/core.hpp"
#include "rgnn/pair_transform.hpp"
#include "rgnn/tensor.hpp"

namespace rgnn {

enum class ModelKind { rgnn, rgnn_t, rgnn2, two_gnn };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

struct RgnnConfig {
    enum class Readout { sum_all, diagonal_pairs };

    int embed_dim = 32;
    int layers = 15;
    bool shared_weights = true;
    Readout readout = Readout::diagonal_pairs;
};

struct InputAtom {
    PredicateId predicate = -1;
    std::vector<int> args;  // node indices
};

// Message-passing input: a node universe plus the atoms routed over it.
struct NetworkInput {
    int num_nodes = 0;
    int num_objects = 0;
    std::vector<InputAtom> atoms;
    std::vector<int> readout_nodes;
    std::vector<int> diagonal_of;  // object -> node of <o,o>, -1 when absent
    std::vector<std::string> node_names;
    // 2-GNN initial-embedding marks: per node, positions into mark_vocab.
    std::vector<std::vector<int>> init_marks;
    std::vector<std::string> mark_vocab;
};

// Atoms grouped by predicate with flattened argument and message-target
// indices, precomputed once per state.
struct PreparedInput {
    NetworkInput input;
    struct Group {
        PredicateId predicate = -1;
        int arity = 0;
        int atom_count = 0;
        std::vector<int> args_flat;
    };
    std::vector<Group> groups;
    std::vector<int> message_targets;
};

PreparedInput prepare_input(NetworkInput input);
std::size_t message_count_per_layer(const PreparedInput& prepared);

// Objects as nodes (plain R-GNN). Rejects arity-0 atoms.
NetworkInput build_object_input(const RelationalState& augmented,
                                const Vocabulary& net_vocab);
// Pair objects as nodes; readout over the diagonal pairs.
NetworkInput build_pair_input(const TransformedState& transformed,
                              const Vocabulary& net_vocab);

// Base vocabulary normalization: goal copies for every domain predicate,
// plus the static @obj marker for the pair-lifted models.
Vocabulary model_base_vocabulary(const Vocabulary& domain_vocab, ModelKind kind);
// Vocabulary the message MLPs are keyed on.
Vocabulary network_vocabulary(const Vocabulary& base_vocab, ModelKind kind,
                              int t);

void init_model_params(ParameterSet& params, const Vocabulary& net_vocab,
                       const Vocabulary& base_vocab, ModelKind kind,
                       const RgnnConfig& config, std::uint64_t seed);

// L rounds of relational message passing with residual updates; returns the
// final embedding matrix (num_nodes x k).
Tape::Id forward_embeddings(Tape& tape, const PreparedInput& prepared,
                            const Vocabulary& net_vocab,
                            const ParameterSet& params, const RgnnConfig& config,
                            GradSink* sink, Tape::Id init_embeddings = -1,
                            std::vector<Tensor>* trace = nullptr);

Tape::Id value_sum_readout(Tape& tape, Tape::Id embeddings,
                           const std::vector<int>& object_nodes,
                           const ParameterSet& params, GradSink* sink);
// Readout over the <o,o> pairs only; every object must have its diagonal.
Tape::Id value_diag_readout(Tape& tape, Tape::Id embeddings,
                            const NetworkInput& input,
                            const ParameterSet& params, GradSink* sink);

// A state value function: model kind, transform parameter, network
// configuration and weights, bound to a base vocabulary.
struct ValueModel {
    ModelKind kind = ModelKind::rgnn_t;
    int t = 1;
    bool cumulative_rt = false;
    RgnnConfig config;
    Vocabulary base_vocab;
    Vocabulary net_vocab;
    ParameterSet params;

    static ValueModel create(ModelKind kind, int t, const RgnnConfig& config,
                             const Vocabulary& domain_vocab, std::uint64_t seed);

    PreparedInput prepare(const RelationalState& raw) const;
    Tape::Id value_on_tape(Tape& tape, const PreparedInput& prepared,
                           GradSink* sink) const;
    double value_prepared(const PreparedInput& prepared) const;
    double value(const RelationalState& raw) const;
};

void save_checkpoint(std::ostream& out, const ValueModel& model);
void save_checkpoint_file(const std::string& path, const ValueModel& model);
ValueModel load_checkpoint(std::istream& in);
ValueModel load_checkpoint_file(const std::string& path);

}  // namespace rgnn

#include "rgnn/network.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "rgnn/baselines.hpp"

namespace rgnn {

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::rgnn: return "rgnn";
    case ModelKind::rgnn_t: return "rgnn-t";
    case ModelKind::rgnn2: return "rgnn2";
    case ModelKind::two_gnn: return "2gnn";
    }
    return "rgnn";
}

ModelKind model_kind_from_string(const std::string& text) {
    if (text == "rgnn") return ModelKind::rgnn;
    if (text == "rgnn-t") return ModelKind::rgnn_t;
    if (text == "rgnn2") return ModelKind::rgnn2;
    if (text == "2gnn") return ModelKind::two_gnn;
    throw Error("unknown model kind: " + text);
}

PreparedInput prepare_input(NetworkInput input) {
    PreparedInput prepared;
    prepared.input = std::move(input);

    std::map<PredicateId, std::vector<const InputAtom*>> by_predicate;
    for (const InputAtom& atom : prepared.input.atoms) {
        if (atom.args.empty())
            throw EmptyTupleError("network input contains an arity-0 atom");
        by_predicate[atom.predicate].push_back(&atom);
    }
    for (const auto& [pred, atoms] : by_predicate) {
        PreparedInput::Group group;
        group.predicate = pred;
        group.arity = static_cast<int>(atoms.front()->args.size());
        group.atom_count = static_cast<int>(atoms.size());
        for (const InputAtom* atom : atoms) {
            if (static_cast<int>(atom->args.size()) != group.arity)
                throw ArityMismatchError("inconsistent arity in atom group");
            for (int arg : atom->args) {
                if (arg < 0 || arg >= prepared.input.num_nodes)
                    throw UniverseMismatchError("atom argument outside universe");
                group.args_flat.push_back(arg);
                prepared.message_targets.push_back(arg);
            }
        }
        prepared.groups.push_back(std::move(group));
    }
    return prepared;
}

std::size_t message_count_per_layer(const PreparedInput& prepared) {
    return prepared.message_targets.size();
}

NetworkInput build_object_input(const RelationalState& augmented,
                                const Vocabulary& net_vocab) {
    NetworkInput input;
    input.num_nodes = static_cast<int>(augmented.objects.size());
    input.num_objects = input.num_nodes;
    input.node_names = augmented.objects;
    for (const Atom& atom : augmented.atoms) {
        if (atom.args.empty())
            throw EmptyTupleError(
                "arity-0 atom cannot be routed to any object: " +
                atom_to_text(augmented.vocab, augmented.objects, atom));
        InputAtom ia;
        const Predicate& p = augmented.vocab.at(atom.predicate);
        ia.predicate = net_vocab.id(p.name);
        if (net_vocab.at(ia.predicate).arity != p.arity)
            throw ArityMismatchError("predicate " + p.name +
                                     " arity differs from the model vocabulary");
        ia.args.assign(atom.args.begin(), atom.args.end());
        input.atoms.push_back(std::move(ia));
    }
    input.readout_nodes.resize(static_cast<std::size_t>(input.num_nodes));
    for (int i = 0; i < input.num_nodes; ++i) input.readout_nodes[static_cast<std::size_t>(i)] = i;
    return input;
}

NetworkInput build_pair_input(const TransformedState& transformed,
                              const Vocabulary& net_vocab) {
    NetworkInput input;
    input.num_nodes = static_cast<int>(transformed.pairs.size());
    input.num_objects = static_cast<int>(transformed.object_names.size());
    for (int i = 0; i < input.num_nodes; ++i)
        input.node_names.push_back(transformed.pair_name(i));
    for (const PairAtom& atom : transformed.atoms) {
        InputAtom ia;
        const Predicate& p = transformed.vocab.at(atom.predicate);
        ia.predicate = net_vocab.id(p.name);
        if (net_vocab.at(ia.predicate).arity != p.arity)
            throw ArityMismatchError("predicate " + p.name +
                                     " arity differs from the model vocabulary");
        ia.args = atom.args;
        input.atoms.push_back(std::move(ia));
    }
    input.diagonal_of.assign(static_cast<std::size_t>(input.num_objects), -1);
    for (ObjectId o = 0; o < input.num_objects; ++o) {
        int node = transformed.pair_index(PairObject{o, o});
        input.diagonal_of[static_cast<std::size_t>(o)] = node;
        if (node >= 0) input.readout_nodes.push_back(node);
    }
    return input;
}

Vocabulary model_base_vocabulary(const Vocabulary& domain_vocab, ModelKind kind) {
    Vocabulary base;
    for (const Predicate& p : domain_vocab.predicates())
        base.ensure(p.name, p.arity, p.origin);
    for (const Predicate& p : domain_vocab.predicates())
        if (p.origin == PredicateOrigin::domain)
            base.ensure(goal_copy_name(p.name), p.arity, PredicateOrigin::goal_copy);
    if (kind == ModelKind::rgnn_t || kind == ModelKind::rgnn2)
        base.ensure(kObjPredicate, 1, PredicateOrigin::static_obj);
    return base;
}

Vocabulary network_vocabulary(const Vocabulary& base_vocab, ModelKind kind,
                              int t) {
    Vocabulary net;
    switch (kind) {
    case ModelKind::rgnn:
        for (const Predicate& p : base_vocab.predicates())
            net.ensure(p.name, p.arity, p.origin);
        break;
    case ModelKind::rgnn_t:
    case ModelKind::rgnn2:
        for (const Predicate& p : base_vocab.predicates()) {
            const int arity = p.arity == 0 ? 0 : p.arity * p.arity;
            PredicateOrigin origin = p.origin == PredicateOrigin::static_obj
                                         ? PredicateOrigin::static_obj
                                         : PredicateOrigin::pair_lift;
            net.ensure(p.name, arity, origin);
        }
        if (kind == ModelKind::rgnn2 || t >= 1)
            net.ensure(kDeltaPredicate, 3, PredicateOrigin::triangle);
        break;
    case ModelKind::two_gnn:
        net.ensure(kTwoGnnLeft, 2, PredicateOrigin::baseline_aux);
        net.ensure(kTwoGnnRight, 2, PredicateOrigin::baseline_aux);
        break;
    }
    return net;
}

namespace {

std::string layer_suffix(const RgnnConfig& config, int layer) {
    return config.shared_weights ? std::string() : "/l" + std::to_string(layer);
}

struct ParamSpec {
    std::string name;
    std::size_t rows, cols;
    bool is_weight;
};

}  // namespace

void init_model_params(ParameterSet& params, const Vocabulary& net_vocab,
                       const Vocabulary& base_vocab, ModelKind kind,
                       const RgnnConfig& config, std::uint64_t seed) {
    const std::size_t k = static_cast<std::size_t>(config.embed_dim);
    std::vector<ParamSpec> specs;
    const int weight_copies = config.shared_weights ? 1 : config.layers;
    for (int copy = 0; copy < weight_copies; ++copy) {
        const std::string suffix = layer_suffix(config, copy);
        for (PredicateId id : net_vocab.ids_by_name()) {
            const Predicate& p = net_vocab.at(id);
            if (p.arity == 0) continue;
            const std::size_t m = static_cast<std::size_t>(p.arity);
            const std::string stem = "msg/" + p.name + suffix;
            specs.push_back({stem + "/w1", m * k, k, true});
            specs.push_back({stem + "/b1", 1, k, false});
            specs.push_back({stem + "/w2", k, m * k, true});
            specs.push_back({stem + "/b2", 1, m * k, false});
        }
        const std::string stem = "update" + suffix;
        specs.push_back({stem + "/w1", 2 * k, k, true});
        specs.push_back({stem + "/b1", 1, k, false});
        specs.push_back({stem + "/w2", k, k, true});
        specs.push_back({stem + "/b2", 1, k, false});
    }
    specs.push_back({"readout/w1", k, k, true});
    specs.push_back({"readout/b1", 1, k, false});
    specs.push_back({"readout/w2", k, 1, true});
    specs.push_back({"readout/b2", 1, 1, false});
    if (kind == ModelKind::two_gnn) {
        for (PredicateId id : base_vocab.ids_by_name()) {
            const Predicate& p = base_vocab.at(id);
            if (p.arity < 1 || p.arity > 2) continue;
            specs.push_back({"pair0/" + p.name, 1, k, true});
        }
    }

    std::sort(specs.begin(), specs.end(),
              [](const ParamSpec& a, const ParamSpec& b) { return a.name < b.name; });
    Rng rng(seed);
    for (const ParamSpec& spec : specs) {
        if (spec.is_weight)
            params.add(spec.name, glorot_uniform(spec.rows, spec.cols, rng));
        else
            params.add(spec.name, Tensor::zeros(spec.rows, spec.cols));
    }
}

namespace {

struct MlpIds {
    Tape::Id w1 = -1, b1 = -1, w2 = -1, b2 = -1;
};

MlpIds resolve_mlp(Tape& tape, const ParameterSet& params, GradSink* sink,
                   const std::string& stem) {
    auto get = [&](const std::string& leaf) {
        int idx = params.index_of(stem + leaf);
        if (idx < 0)
            throw UnknownPredicateError("no parameters registered for " + stem);
        return tape.param(params, idx, sink);
    };
    return MlpIds{get("/w1"), get("/b1"), get("/w2"), get("/b2")};
}

Tape::Id apply_mlp(Tape& tape, Tape::Id x, const MlpIds& mlp) {
    Tape::Id hidden = tape.mish(tape.linear(x, mlp.w1, mlp.b1));
    return tape.linear(hidden, mlp.w2, mlp.b2);
}

}  // namespace

Tape::Id forward_embeddings(Tape& tape, const PreparedInput& prepared,
                            const Vocabulary& net_vocab,
                            const ParameterSet& params, const RgnnConfig& config,
                            GradSink* sink, Tape::Id init_embeddings,
                            std::vector<Tensor>* trace) {
    const int n = prepared.input.num_nodes;
    const std::size_t k = static_cast<std::size_t>(config.embed_dim);

    Tape::Id emb = init_embeddings >= 0
                       ? init_embeddings
                       : tape.zeros(static_cast<std::size_t>(n), k);
    if (tape.val(emb).rows() != static_cast<std::size_t>(n) ||
        tape.val(emb).cols() != k)
        throw ShapeMismatchError("initial embeddings have the wrong shape");

    auto resolve_layer = [&](int layer) {
        const std::string suffix = layer_suffix(config, layer);
        std::vector<MlpIds> msg;
        msg.reserve(prepared.groups.size());
        for (const auto& group : prepared.groups) {
            const Predicate& p = net_vocab.at(group.predicate);
            msg.push_back(resolve_mlp(tape, params, sink, "msg/" + p.name + suffix));
        }
        MlpIds update = resolve_mlp(tape, params, sink, "update" + suffix);
        return std::make_pair(std::move(msg), update);
    };

    std::vector<MlpIds> shared_msg;
    MlpIds shared_update;
    if (config.shared_weights)
        std::tie(shared_msg, shared_update) = resolve_layer(0);

    for (int layer = 0; layer < config.layers; ++layer) {
        std::vector<MlpIds> layer_msg;
        MlpIds layer_update;
        if (config.shared_weights) {
            layer_msg = shared_msg;
            layer_update = shared_update;
        } else {
            std::tie(layer_msg, layer_update) = resolve_layer(layer);
        }

        std::vector<Tape::Id> blocks;
        for (std::size_t g = 0; g < prepared.groups.size(); ++g) {
            const auto& group = prepared.groups[g];
            Tape::Id x = tape.gather_concat(emb, group.args_flat, group.arity);
            Tape::Id y = apply_mlp(tape, x, layer_msg[g]);
            blocks.push_back(tape.rows_to_messages(y, group.arity));
        }
        Tape::Id agg;
        if (blocks.empty()) {
            agg = tape.zeros(static_cast<std::size_t>(n), k);
        } else {
            Tape::Id messages =
                blocks.size() == 1 ? blocks[0] : tape.concat_rows(blocks);
            agg = tape.aggregate_smoothmax(messages, prepared.message_targets, n);
        }
        Tape::Id update_in = tape.concat_cols(emb, agg);
        emb = tape.add(emb, apply_mlp(tape, update_in, layer_update));
        if (trace) trace->push_back(tape.val(emb));
    }
    return emb;
}

Tape::Id value_sum_readout(Tape& tape, Tape::Id embeddings,
                           const std::vector<int>& object_nodes,
                           const ParameterSet& params, GradSink* sink) {
    Tape::Id pooled = tape.sum_rows_sorted(embeddings, object_nodes);
    MlpIds readout = resolve_mlp(tape, params, sink, "readout");
    return apply_mlp(tape, pooled, readout);
}

Tape::Id value_diag_readout(Tape& tape, Tape::Id embeddings,
                            const NetworkInput& input,
                            const ParameterSet& params, GradSink* sink) {
    if (static_cast<int>(input.diagonal_of.size()) != input.num_objects)
        throw MissingDiagonalError("diagonal map not built for this input");
    for (int node : input.diagonal_of)
        if (node < 0)
            throw MissingDiagonalError(
                "universe lacks a diagonal pair for some object");
    return value_sum_readout(tape, embeddings, input.diagonal_of, params, sink);
}

ValueModel ValueModel::create(ModelKind kind, int t, const RgnnConfig& config,
                              const Vocabulary& domain_vocab,
                              std::uint64_t seed) {
    ValueModel model;
    model.kind = kind;
    model.t = kind == ModelKind::rgnn_t ? t : 0;
    model.config = config;
    model.config.readout = kind == ModelKind::rgnn
                               ? RgnnConfig::Readout::sum_all
                               : RgnnConfig::Readout::diagonal_pairs;
    model.base_vocab = model_base_vocabulary(domain_vocab, kind);
    if (kind == ModelKind::two_gnn) {
        for (const Predicate& p : model.base_vocab.predicates())
            if (p.arity > 2)
                throw ArityTooHighError("unsuitable domain: ternary predicates (" +
                                        p.name + "/" + std::to_string(p.arity) +
                                        ")");
    }
    model.net_vocab = network_vocabulary(model.base_vocab, kind, model.t);
    init_model_params(model.params, model.net_vocab, model.base_vocab, kind,
                      model.config, seed);
    return model;
}

PreparedInput ValueModel::prepare(const RelationalState& raw) const {
    switch (kind) {
    case ModelKind::rgnn: {
        RelationalState s = augment_goal(raw);
        return prepare_input(build_object_input(s, net_vocab));
    }
    case ModelKind::rgnn_t: {
        RelationalState s = add_obj_atoms(augment_goal(raw));
        TransformedState ts = at_transform(s, t, cumulative_rt);
        return prepare_input(build_pair_input(ts, net_vocab));
    }
    case ModelKind::rgnn2: {
        RelationalState s = add_obj_atoms(augment_goal(raw));
        TransformedState ts = build_rgnn2_input(s);
        return prepare_input(build_pair_input(ts, net_vocab));
    }
    case ModelKind::two_gnn: {
        RelationalState s = augment_goal(raw);
        return prepare_input(build_2gnn_input(s, net_vocab));
    }
    }
    throw Error("unreachable model kind");
}

Tape::Id ValueModel::value_on_tape(Tape& tape, const PreparedInput& prepared,
                                   GradSink* sink) const {
    Tape::Id init = -1;
    if (kind == ModelKind::two_gnn) {
        std::vector<Tape::Id> vectors;
        for (const std::string& name : prepared.input.mark_vocab) {
            int idx = params.index_of("pair0/" + name);
            if (idx < 0)
                throw UnknownPredicateError("no pair embedding for predicate " +
                                            name);
            vectors.push_back(tape.param(params, idx, sink));
        }
        init = tape.mark_embeddings(prepared.input.num_nodes, config.embed_dim,
                                    std::move(vectors), prepared.input.init_marks);
    }
    Tape::Id emb = forward_embeddings(tape, prepared, net_vocab, params, config,
                                      sink, init);
    if (config.readout == RgnnConfig::Readout::sum_all)
        return value_sum_readout(tape, emb, prepared.input.readout_nodes, params,
                                 sink);
    return value_diag_readout(tape, emb, prepared.input, params, sink);
}

double ValueModel::value_prepared(const PreparedInput& prepared) const {
    Tape tape(false);
    return tape.scalar_value(value_on_tape(tape, prepared, nullptr));
}

double ValueModel::value(const RelationalState& raw) const {
    return value_prepared(prepare(raw));
}

namespace {

const char* readout_name(RgnnConfig::Readout readout) {
    return readout == RgnnConfig::Readout::sum_all ? "sum-all" : "diagonal-pairs";
}

RgnnConfig::Readout readout_from_name(const std::string& text) {
    if (text == "sum-all") return RgnnConfig::Readout::sum_all;
    if (text == "diagonal-pairs") return RgnnConfig::Readout::diagonal_pairs;
    throw CheckpointError("unknown readout mode: " + text);
}

void write_vocab(std::ostream& out, const char* title, const Vocabulary& vocab) {
    out << title << " " << vocab.size() << "\n";
    for (const Predicate& p : vocab.predicates())
        out << p.name << " " << p.arity << " " << to_string(p.origin) << "\n";
}

Vocabulary read_vocab(std::istream& in, int count) {
    Vocabulary vocab;
    for (int i = 0; i < count; ++i) {
        std::string name, origin;
        int arity;
        if (!(in >> name >> arity >> origin))
            throw CheckpointError("truncated vocabulary section");
        vocab.add(name, arity, origin_from_string(origin));
    }
    return vocab;
}

}  // namespace

void save_checkpoint(std::ostream& out, const ValueModel& model) {
    out << "rgnn-checkpoint 1\n";
    out << "model " << to_string(model.kind) << "\n";
    out << "t " << model.t << "\n";
    out << "cumulative " << (model.cumulative_rt ? 1 : 0) << "\n";
    out << "dim " << model.config.embed_dim << "\n";
    out << "layers " << model.config.layers << "\n";
    out << "shared-weights " << (model.config.shared_weights ? 1 : 0) << "\n";
    out << "readout " << readout_name(model.config.readout) << "\n";
    write_vocab(out, "base-vocab", model.base_vocab);
    write_vocab(out, "net-vocab", model.net_vocab);
    out << "params " << model.params.size() << "\n";
    for (int i = 0; i < model.params.size(); ++i) {
        const ParameterSet::Param& p = model.params.at(i);
        out << p.name << " " << p.value.rows() << " " << p.value.cols() << "\n";
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            if (j) out << " ";
            out << format_double17(p.value.values[j]);
        }
        out << "\n";
    }
    out << "end\n";
}

ValueModel load_checkpoint(std::istream& in) {
    std::string word;
    int version;
    if (!(in >> word >> version) || word != "rgnn-checkpoint" || version != 1)
        throw CheckpointError("not a checkpoint file");

    ValueModel model;
    Vocabulary stored_net;
    bool have_base = false;

    while (in >> word) {
        if (word == "model") {
            std::string kind;
            in >> kind;
            model.kind = model_kind_from_string(kind);
        } else if (word == "t") {
            in >> model.t;
        } else if (word == "cumulative") {
            int v;
            in >> v;
            model.cumulative_rt = v != 0;
        } else if (word == "dim") {
            in >> model.config.embed_dim;
        } else if (word == "layers") {
            in >> model.config.layers;
        } else if (word == "shared-weights") {
            int v;
            in >> v;
            model.config.shared_weights = v != 0;
        } else if (word == "readout") {
            std::string mode;
            in >> mode;
            model.config.readout = readout_from_name(mode);
        } else if (word == "base-vocab") {
            int count;
            in >> count;
            model.base_vocab = read_vocab(in, count);
            have_base = true;
        } else if (word == "net-vocab") {
            int count;
            in >> count;
            stored_net = read_vocab(in, count);
        } else if (word == "params") {
            if (!have_base) throw CheckpointError("params before vocabulary");
            model.net_vocab =
                network_vocabulary(model.base_vocab, model.kind, model.t);
            // the stored network vocabulary must match the derived one
            for (const Predicate& p : stored_net.predicates()) {
                if (!model.net_vocab.contains(p.name) ||
                    model.net_vocab.at(model.net_vocab.id(p.name)).arity != p.arity)
                    throw CheckpointError("stored network vocabulary disagrees "
                                          "with the model structure: " + p.name);
            }
            if (stored_net.size() != model.net_vocab.size())
                throw CheckpointError("network vocabulary size mismatch");

            init_model_params(model.params, model.net_vocab, model.base_vocab,
                              model.kind, model.config, 0);
            int count;
            in >> count;
            if (count != model.params.size())
                throw CheckpointError("parameter count mismatch: file has " +
                                      std::to_string(count) + ", model needs " +
                                      std::to_string(model.params.size()));
            for (int i = 0; i < count; ++i) {
                std::string name;
                std::size_t rows, cols;
                if (!(in >> name >> rows >> cols))
                    throw CheckpointError("truncated parameter header");
                int idx = model.params.index_of(name);
                if (idx < 0)
                    throw CheckpointError("unknown parameter in checkpoint: " + name);
                Tensor& value = model.params.at(idx).value;
                if (value.rows() != rows || value.cols() != cols)
                    throw CheckpointError("parameter shape mismatch for " + name);
                for (std::size_t j = 0; j < value.size(); ++j)
                    if (!(in >> value.values[j]))
                        throw CheckpointError("truncated values for " + name);
            }
        } else if (word == "end") {
            return model;
        } else {
            throw CheckpointError("unexpected checkpoint token: " + word);
        }
    }
    throw CheckpointError("checkpoint missing end marker");
}

void save_checkpoint_file(const std::string& path, const ValueModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    save_checkpoint(out, model);
}

ValueModel load_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    return load_checkpoint(in);
}

}  // namespace rgnn

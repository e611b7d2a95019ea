#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "rgnn/generators.hpp"
#include "rgnn/network.hpp"
#include "rgnn/state_space.hpp"
#include "rgnn/trainer.hpp"

using namespace rgnn;

namespace {

RgnnConfig small_config(int dim, int layers) {
    RgnnConfig c;
    c.embed_dim = dim;
    c.layers = layers;
    return c;
}

// Renames every object through a bijection and re-canonicalizes; the new
// names force a different canonical object order.
RelationalState rename_objects(const RelationalState& s,
                               const std::map<std::string, std::string>& names) {
    RelationalState out = s;
    for (std::string& name : out.objects) name = names.at(name);
    return canonicalize(out);
}

std::map<std::string, std::string> shuffled_names(const RelationalState& s,
                                                  std::uint64_t seed) {
    std::vector<std::string> fresh;
    const char* tags[] = {"zeta", "kilo", "echo", "mike", "acre", "pond",
                          "veil", "dusk", "iron", "opal", "quin", "rook"};
    for (std::size_t i = 0; i < s.objects.size(); ++i)
        fresh.push_back(std::string(tags[i % 12]) + std::to_string(i / 12));
    Rng rng(seed);
    rng.shuffle(fresh);
    std::map<std::string, std::string> names;
    for (std::size_t i = 0; i < s.objects.size(); ++i)
        names[s.objects[i]] = fresh[i];
    return names;
}

}  // namespace

TEST_CASE("an atomless state keeps all-zero embeddings at initialization") {
    Vocabulary vocab;
    vocab.add("p", 2, PredicateOrigin::domain);
    ValueModel model = ValueModel::create(ModelKind::rgnn, 0, small_config(8, 4),
                                          vocab, 1);
    RelationalState s;
    s.vocab = vocab;
    s.objects = {"a", "b", "c"};
    // zero-initialized biases keep MLP_U(0, 0) = 0 through every layer
    CHECK(model.value(s) == 0.0);
}

TEST_CASE("renaming objects leaves the plain R-GNN value bit-identical") {
    Instance inst = parse_generated(gen_gripper(2, 5));
    ValueModel model = ValueModel::create(ModelKind::rgnn, 0, small_config(8, 5),
                                          inst.domain.vocab, 3);
    const double base = model.value(inst.init);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        RelationalState renamed =
            rename_objects(inst.init, shuffled_names(inst.init, seed));
        CHECK(model.value(renamed) == base);
    }
}

TEST_CASE("renaming objects leaves the R-GNN[1] value bit-identical") {
    Instance inst = parse_generated(gen_navig_xy(3, 3, 0.2, 2));
    ValueModel model = ValueModel::create(ModelKind::rgnn_t, 1,
                                          small_config(8, 4), inst.domain.vocab, 7);
    const double base = model.value(inst.init);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        RelationalState renamed =
            rename_objects(inst.init, shuffled_names(inst.init, seed));
        CHECK(model.value(renamed) == base);
    }
}

TEST_CASE("automorphic objects share embeddings at every layer") {
    // two balls in the same room with both grippers free are interchangeable
    Instance inst = parse_generated(gen_gripper(2, 1));
    ValueModel model = ValueModel::create(ModelKind::rgnn, 0, small_config(8, 4),
                                          inst.domain.vocab, 11);

    RelationalState s = augment_goal(inst.init);
    PreparedInput prepared = prepare_input(
        build_object_input(s, model.net_vocab));
    const int b1 = 0, b2 = 1;  // canonical order: ball1 ball2 left right ...
    REQUIRE(s.objects[0] == "ball1");
    REQUIRE(s.objects[1] == "ball2");

    Tape tape(false);
    std::vector<Tensor> trace;
    forward_embeddings(tape, prepared, model.net_vocab, model.params,
                       model.config, nullptr, -1, &trace);
    REQUIRE(trace.size() == 4);
    for (const Tensor& layer : trace)
        for (std::size_t c = 0; c < layer.cols(); ++c)
            CHECK(layer.at(b1, c) == layer.at(b2, c));
}

TEST_CASE("message counts per layer match the arity sum") {
    Instance inst = parse_generated(gen_navig_xy(3, 3, 0.3, 4));
    RelationalState s = add_obj_atoms(augment_goal(inst.init));
    TransformedState ts = at_transform(s, 1);
    Vocabulary net = network_vocabulary(
        model_base_vocabulary(inst.domain.vocab, ModelKind::rgnn_t),
        ModelKind::rgnn_t, 1);
    PreparedInput prepared = prepare_input(build_pair_input(ts, net));

    std::size_t by_hand = 0;
    for (const PairAtom& atom : ts.atoms) by_hand += atom.args.size();
    CHECK(message_count_per_layer(prepared) == by_hand);

    // the t=1 structure decomposes into lifted-arity and triangle messages
    std::size_t lifted = 0, triangles = 0;
    const PredicateId delta = ts.vocab.id(kDeltaPredicate);
    for (const PairAtom& atom : ts.atoms) {
        if (atom.predicate == delta)
            ++triangles;
        else
            lifted += atom.args.size();
    }
    CHECK(message_count_per_layer(prepared) == lifted + 3 * triangles);
}

TEST_CASE("shared weights keep the parameter count independent of depth") {
    Vocabulary vocab;
    vocab.add("p", 2, PredicateOrigin::domain);
    ValueModel shallow = ValueModel::create(ModelKind::rgnn, 0,
                                            small_config(8, 3), vocab, 1);
    ValueModel deep = ValueModel::create(ModelKind::rgnn, 0, small_config(8, 9),
                                         vocab, 1);
    CHECK(shallow.params.size() == deep.params.size());
    CHECK(shallow.params.value_count() == deep.params.value_count());

    RgnnConfig unshared = small_config(8, 3);
    unshared.shared_weights = false;
    ValueModel separate =
        ValueModel::create(ModelKind::rgnn, 0, unshared, vocab, 1);
    CHECK(separate.params.size() > shallow.params.size());
}

TEST_CASE("sum readout is additive and order-invariant") {
    ParameterSet params;
    Vocabulary vocab;
    RgnnConfig config = small_config(4, 1);
    init_model_params(params, vocab, vocab, ModelKind::rgnn, config, 5);

    Tensor table = Tensor::zeros(3, 4);
    Rng rng(3);
    for (double& v : table.values) v = rng.uniform(-1, 1);

    Tape tape(false);
    Tape::Id emb = tape.leaf(table);
    const double v_once =
        tape.scalar_value(value_sum_readout(tape, emb, {0, 1}, params, nullptr));
    const double v_permuted =
        tape.scalar_value(value_sum_readout(tape, emb, {1, 0}, params, nullptr));
    CHECK(v_once == v_permuted);

    // duplicating a node changes the sum: no averaging
    const double v_dup =
        tape.scalar_value(value_sum_readout(tape, emb, {0, 1, 1}, params, nullptr));
    CHECK(v_dup != v_once);
}

TEST_CASE("diagonal readout demands every diagonal pair") {
    ParameterSet params;
    Vocabulary vocab;
    RgnnConfig config = small_config(4, 1);
    init_model_params(params, vocab, vocab, ModelKind::rgnn_t, config, 5);

    NetworkInput input;
    input.num_nodes = 3;
    input.num_objects = 2;
    input.diagonal_of = {0, -1};  // second object lacks its <o,o>

    Tape tape(false);
    Tape::Id emb = tape.zeros(3, 4);
    CHECK_THROWS_AS(value_diag_readout(tape, emb, input, params, nullptr),
                    MissingDiagonalError);

    input.diagonal_of = {0, 2};
    CHECK(tape.scalar_value(
              value_diag_readout(tape, emb, input, params, nullptr)) == 0.0);
}

TEST_CASE("single-object states make both readouts coincide") {
    Vocabulary vocab;
    vocab.add("mark", 1, PredicateOrigin::domain);
    ValueModel model = ValueModel::create(ModelKind::rgnn_t, 0,
                                          small_config(6, 2), vocab, 9);
    RelationalState s;
    s.vocab = vocab;
    s.objects = {"only"};
    s.atoms = {Atom{0, {0}}};
    PreparedInput prepared = model.prepare(s);
    REQUIRE(prepared.input.num_nodes == 1);

    Tape tape(false);
    Tape::Id emb = forward_embeddings(tape, prepared, model.net_vocab,
                                      model.params, model.config, nullptr);
    const double diag = tape.scalar_value(
        value_diag_readout(tape, emb, prepared.input, model.params, nullptr));
    const double sum = tape.scalar_value(
        value_sum_readout(tape, emb, {0}, model.params, nullptr));
    CHECK(diag == sum);
}

TEST_CASE("rgnn-t values are finite and reproducible") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.0, 9));
    ValueModel model = ValueModel::create(ModelKind::rgnn_t, 1,
                                          small_config(8, 4), inst.domain.vocab, 2);
    const double a = model.value(inst.init);
    const double b = model.value(inst.init);
    CHECK(std::isfinite(a));
    CHECK(a == b);
}

TEST_CASE("a trained model separates states that differ in one atom") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.0, 10));
    StateSpace space = expand(inst.domain, inst.init);
    std::vector<int> vstar = optimal_values(space);

    std::vector<LabeledState> data;
    for (std::size_t i = 0; i < space.size(); ++i)
        data.push_back(LabeledState{inst.id, space.states[i], vstar[i]});

    TrainConfig config;
    config.kind = ModelKind::rgnn_t;
    config.t = 1;
    config.net = small_config(8, 3);
    config.max_steps = 60;
    config.batch_size = 4;
    config.lr = 1e-2;
    config.seeds = {1};
    ValueModel model;
    train(config, inst.domain.vocab, data, data, &model);

    RelationalState with_blocked = inst.init;
    with_blocked.atoms.push_back(
        Atom{with_blocked.vocab.id("blocked"),
             {0, static_cast<ObjectId>(with_blocked.objects.size() - 1)}});
    with_blocked = canonicalize(with_blocked);
    CHECK(model.value(inst.init) != model.value(with_blocked));
}

TEST_CASE("states with unregistered predicates are rejected") {
    Vocabulary vocab;
    vocab.add("p", 2, PredicateOrigin::domain);
    ValueModel model = ValueModel::create(ModelKind::rgnn, 0, small_config(4, 2),
                                          vocab, 1);
    RelationalState s;
    s.vocab.add("q", 1, PredicateOrigin::domain);
    s.objects = {"a"};
    s.atoms = {Atom{0, {0}}};
    CHECK_THROWS_AS(model.value(s), UnknownPredicateError);
}

TEST_CASE("arity-0 atoms are rejected by the input builders") {
    Vocabulary vocab;
    vocab.add("flag", 0, PredicateOrigin::domain);
    vocab.add("p", 1, PredicateOrigin::domain);
    ValueModel model = ValueModel::create(ModelKind::rgnn, 0, small_config(4, 2),
                                          vocab, 1);
    RelationalState s;
    s.vocab = vocab;
    s.objects = {"a"};
    s.atoms = {Atom{0, {}}};
    CHECK_THROWS_AS(model.value(s), EmptyTupleError);
}

TEST_CASE("checkpoints reload to the same values and structure") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.2, 12));
    ValueModel model = ValueModel::create(ModelKind::rgnn_t, 1,
                                          small_config(6, 3), inst.domain.vocab, 4);
    const double before = model.value(inst.init);

    std::stringstream buffer;
    save_checkpoint(buffer, model);
    ValueModel loaded = load_checkpoint(buffer);
    CHECK(loaded.value(inst.init) == before);

    std::stringstream again;
    save_checkpoint(again, loaded);
    std::stringstream first;
    save_checkpoint(first, model);
    CHECK(first.str() == again.str());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "rgnn/generators.hpp"
#include "rgnn/trainer.hpp"

using namespace rgnn;

namespace {

std::vector<LabeledState> labeled_space(const Instance& inst) {
    StateSpace space = expand(inst.domain, inst.init);
    std::vector<int> vstar = optimal_values(space);
    std::vector<LabeledState> out;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (vstar[i] != kInfiniteValue)
            out.push_back(LabeledState{inst.id, space.states[i], vstar[i]});
    return out;
}

TrainConfig tiny_config() {
    TrainConfig config;
    config.kind = ModelKind::rgnn_t;
    config.t = 1;
    config.net.embed_dim = 8;
    config.net.layers = 3;
    config.batch_size = 4;
    config.seeds = {1};
    return config;
}

}  // namespace

TEST_CASE("the loss is the absolute value error") {
    CHECK(value_loss(4, 4.0) == 0.0);
    CHECK(value_loss(4, 2.5) == 1.5);
    CHECK(value_loss(0, -2.0) == 2.0);
    CHECK_THROWS_AS(value_loss(kInfiniteValue, 1.0), InfiniteLabelError);
}

TEST_CASE("the loss subgradient is the sign of the error") {
    for (double v : {3.5, 5.0, 6.5}) {
        Tape tape(true);
        Tape::Id value = tape.leaf(Tensor::scalar(v));
        Tape::Id loss = tape.abs_diff(value, 5.0);
        tape.backward(loss);
        const Tensor& leaf = tape.val(value);
        const double expected = v > 5.0 ? 1.0 : (v < 5.0 ? -1.0 : 0.0);
        CHECK(leaf.grad[0] == expected);
    }
}

TEST_CASE("sixteen distinct values fill one batch without repeats") {
    std::vector<int> vstars;
    for (int v = 0; v < 16; ++v) vstars.push_back(v);
    auto batches = make_batches(vstars, 16, 3);
    REQUIRE(batches.size() == 1);
    std::set<int> seen;
    for (int index : batches[0]) seen.insert(vstars[static_cast<std::size_t>(index)]);
    CHECK(seen.size() == 16);
}

TEST_CASE("both strata appear in every batch when values repeat") {
    std::vector<int> vstars;
    for (int i = 0; i < 16; ++i) vstars.push_back(1);
    for (int i = 0; i < 16; ++i) vstars.push_back(2);
    auto batches = make_batches(vstars, 16, 5);
    REQUIRE(batches.size() == 2);
    for (const auto& batch : batches) {
        std::set<int> seen;
        for (int index : batch) seen.insert(vstars[static_cast<std::size_t>(index)]);
        CHECK(seen == std::set<int>{1, 2});
    }
}

TEST_CASE("batching covers each state once per epoch, deterministically") {
    std::vector<int> vstars{0, 0, 1, 1, 2, 2, 3, 5, 5, 8};
    auto a = make_batches(vstars, 3, 7);
    auto b = make_batches(vstars, 3, 7);
    CHECK(a == b);
    std::set<int> covered;
    std::size_t total = 0;
    for (const auto& batch : a)
        for (int index : batch) {
            covered.insert(index);
            ++total;
        }
    CHECK(total == vstars.size());
    CHECK(covered.size() == vstars.size());
}

TEST_CASE("a zero-step budget returns the initial model") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.0, 21));
    auto data = labeled_space(inst);
    TrainConfig config = tiny_config();
    config.max_steps = 0;

    ValueModel best;
    TrainReport report = train(config, inst.domain.vocab, data, data, &best);
    REQUIRE(report.runs.size() == 1);
    CHECK(report.runs[0].steps == 0);
    CHECK(report.runs[0].train_curve.empty());
    REQUIRE(report.runs[0].val_curve.size() == 1);

    ValueModel fresh = ValueModel::create(config.kind, config.t, config.net,
                                          inst.domain.vocab, config.seeds[0]);
    std::stringstream a, b;
    save_checkpoint(a, best);
    save_checkpoint(b, fresh);
    CHECK(a.str() == b.str());
}

TEST_CASE("the selected seed minimizes the final validation loss") {
    Instance inst = parse_generated(gen_navig_xy(2, 3, 0.15, 22));
    auto data = labeled_space(inst);
    TrainConfig config = tiny_config();
    config.max_steps = 12;
    config.seeds = {1, 2, 3};

    ValueModel best;
    TrainReport report = train(config, inst.domain.vocab, data, data, &best);
    REQUIRE(report.runs.size() == 3);
    double minimum = report.runs[0].final_val_loss;
    for (const auto& run : report.runs)
        minimum = std::min(minimum, run.final_val_loss);
    CHECK(report.runs[static_cast<std::size_t>(report.selected)].final_val_loss ==
          minimum);
}

TEST_CASE("training loss trends downward on an overfit task") {
    Instance inst = parse_generated(gen_navig_xy(2, 3, 0.0, 23));
    auto data = labeled_space(inst);
    TrainConfig config = tiny_config();
    config.net.embed_dim = 8;
    config.net.layers = 4;
    config.lr = 2e-3;
    config.max_steps = 200;
    config.batch_size = 16;

    ValueModel best;
    TrainReport report = train(config, inst.domain.vocab, data, data, &best);
    const auto& curve = report.runs[0].train_curve;
    REQUIRE(curve.size() == 200);

    // median of deltas between consecutive 50-step window means
    std::vector<double> window_means;
    for (std::size_t begin = 0; begin + 50 <= curve.size(); begin += 50) {
        double sum = 0.0;
        for (std::size_t i = begin; i < begin + 50; ++i) sum += curve[i].second;
        window_means.push_back(sum / 50.0);
    }
    std::vector<double> deltas;
    for (std::size_t i = 1; i < window_means.size(); ++i)
        deltas.push_back(window_means[i] - window_means[i - 1]);
    std::sort(deltas.begin(), deltas.end());
    CHECK(deltas[deltas.size() / 2] <= 0.0);
}

TEST_CASE("training twice with one config is bit-identical") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.0, 24));
    auto data = labeled_space(inst);
    TrainConfig config = tiny_config();
    config.max_steps = 25;

    auto run_once = [&]() {
        ValueModel best;
        train(config, inst.domain.vocab, data, data, &best);
        std::stringstream out;
        save_checkpoint(out, best);
        return out.str();
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("metrics stream records steps and validation points") {
    Instance inst = parse_generated(gen_navig_xy(2, 2, 0.0, 25));
    auto data = labeled_space(inst);
    TrainConfig config = tiny_config();
    config.max_steps = 4;

    std::stringstream metrics;
    ValueModel best;
    train(config, inst.domain.vocab, data, data, &best, &metrics);
    std::string header;
    std::getline(metrics, header);
    CHECK(header == "step,seed,train_loss,val_loss");
    int lines = 0;
    std::string line;
    while (std::getline(metrics, line)) ++lines;
    CHECK(lines >= 4);
}

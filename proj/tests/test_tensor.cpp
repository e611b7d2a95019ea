#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rgnn/tensor.hpp"

using namespace rgnn;

namespace {

ParameterSet one_param(const std::string& name, Tensor init) {
    ParameterSet params;
    params.add(name, std::move(init));
    return params;
}

}  // namespace

TEST_CASE("linear with identity weights is the identity") {
    Tape tape(false);
    Tensor x = Tensor::zeros(2, 3);
    for (std::size_t i = 0; i < x.size(); ++i) x.values[i] = 0.5 * (double)i - 1;
    Tensor w = Tensor::zeros(3, 3);
    for (std::size_t i = 0; i < 3; ++i) w.at(i, i) = 1.0;
    Tape::Id y = tape.linear(tape.leaf(x), tape.leaf(w),
                             tape.leaf(Tensor::zeros(1, 3)));
    CHECK(tape.val(y).values == x.values);
}

TEST_CASE("gradient of a summed linear output w.r.t. bias is all ones") {
    ParameterSet params;
    Rng rng(3);
    params.add("w", glorot_uniform(3, 4, rng));
    params.add("b", Tensor::zeros(1, 4));
    GradSink sink(params);

    Tape tape(true);
    Tensor x = Tensor::zeros(2, 3);
    for (std::size_t i = 0; i < x.size(); ++i) x.values[i] = rng.uniform(-1, 1);
    Tape::Id y = tape.linear(tape.leaf(x), tape.param(params, params.index_of("w"), &sink),
                             tape.param(params, params.index_of("b"), &sink));
    // project to a scalar with unit weights: sum of all outputs
    Tensor ones = Tensor::zeros(4, 1);
    for (double& v : ones.values) v = 1.0;
    Tape::Id total = tape.linear(y, tape.leaf(ones), tape.leaf(Tensor::zeros(1, 1)));
    Tape::Id summed = tape.sum_rows_sorted(total, {0, 1});
    tape.backward(tape.abs_diff(summed, -1e9));  // positive branch, slope +1

    const auto& db = sink.grads[static_cast<std::size_t>(params.index_of("b"))];
    for (double g : db) CHECK(g == doctest::Approx(2.0));  // two rows
}

TEST_CASE("linear gradients match central differences") {
    Rng rng(11);
    ParameterSet params;
    params.add("w", glorot_uniform(3, 4, rng));
    params.add("b", glorot_uniform(1, 4, rng));
    Tensor x = Tensor::zeros(3, 3);
    for (double& v : x.values) v = rng.uniform(-1, 1);
    Tensor proj = Tensor::zeros(4, 1);
    for (double& v : proj.values) v = rng.uniform(-1, 1);

    double err = grad_check(
        [&](Tape& tape, const ParameterSet& p, GradSink* sink) {
            Tape::Id y = tape.linear(tape.leaf(x), tape.param(p, 0, sink),
                                     tape.param(p, 1, sink));
            Tape::Id s = tape.linear(y, tape.leaf(proj), tape.leaf(Tensor::zeros(1, 1)));
            return tape.abs_diff(tape.sum_rows_sorted(s, {0, 1, 2}), 100.0);
        },
        params, 1e-6, 16, 5);
    CHECK(err <= 1e-6);
}

TEST_CASE("mish fixed points and asymptote") {
    CHECK(mish_value(0.0) == 0.0);
    CHECK(mish_value(20.0) >= 19.999);
    CHECK(mish_value(20.0) <= 20.0);
}

TEST_CASE("mish gradient matches central differences") {
    Rng rng(5);
    ParameterSet params = one_param("x", glorot_uniform(2, 3, rng));
    double err = grad_check(
        [](Tape& tape, const ParameterSet& p, GradSink* sink) {
            Tape::Id y = tape.mish(tape.param(p, 0, sink));
            Tensor proj = Tensor::zeros(3, 1);
            proj.values = {0.7, -0.3, 1.1};
            Tape::Id s = tape.linear(y, tape.leaf(proj), tape.leaf(Tensor::zeros(1, 1)));
            return tape.abs_diff(tape.sum_rows_sorted(s, {0, 1}), 50.0);
        },
        params, 1e-6, 6, 7);
    CHECK(err <= 1e-6);
}

TEST_CASE("smoothmax of a single row is that row") {
    Tensor rows = Tensor::zeros(1, 4);
    rows.values = {0.5, -2.0, 3.25, 0.0};
    Tensor out = smoothmax(rows);
    CHECK(out.values == rows.values);
}

TEST_CASE("smoothmax of two equal rows adds ln 2") {
    Tensor rows = Tensor::zeros(2, 3);
    rows.values = {1.0, -1.0, 0.25, 1.0, -1.0, 0.25};
    Tensor out = smoothmax(rows);
    for (std::size_t c = 0; c < 3; ++c)
        CHECK(out.values[c] == doctest::Approx(rows.values[c] + std::log(2.0)));
}

TEST_CASE("smoothmax approaches the dominant row") {
    Tensor rows = Tensor::zeros(2, 1);
    rows.values = {0.0, 10.0};
    CHECK(smoothmax(rows).values[0] == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("smoothmax of nothing is zero") {
    Tensor rows = Tensor::zeros(0, 5);
    Tensor out = smoothmax(rows);
    for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("smoothmax brackets the maximum") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        Tensor rows = Tensor::zeros(n, 3);
        for (double& v : rows.values) v = rng.uniform(-5, 5);
        Tensor out = smoothmax(rows);
        for (std::size_t c = 0; c < 3; ++c) {
            double mx = rows.at(0, c);
            for (std::size_t r = 1; r < n; ++r) mx = std::max(mx, rows.at(r, c));
            CHECK(out.values[c] >= mx);
            CHECK(out.values[c] <= mx + std::log(static_cast<double>(n)) + 1e-12);
        }
    }
}

TEST_CASE("aggregate_smoothmax is order independent and matches smoothmax") {
    Rng rng(17);
    Tensor msgs = Tensor::zeros(6, 2);
    for (double& v : msgs.values) v = rng.uniform(-3, 3);

    Tape tape(false);
    Tape::Id agg = tape.aggregate_smoothmax(tape.leaf(msgs), {0, 1, 0, 1, 0, 1}, 3);
    const Tensor& out = tape.val(agg);

    Tensor rows0 = Tensor::zeros(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 2; ++c) rows0.at(i, c) = msgs.at(2 * i, c);
    Tensor expected0 = smoothmax(rows0);
    for (int c = 0; c < 2; ++c) {
        CHECK(out.at(0, c) == expected0.values[static_cast<std::size_t>(c)]);
        CHECK(out.at(2, c) == 0.0);  // node without messages
    }

    // permuting message order leaves the result bit-identical
    Tensor shuffled = Tensor::zeros(6, 2);
    const int perm[6] = {4, 0, 2, 5, 3, 1};
    std::vector<int> targets(6);
    for (int i = 0; i < 6; ++i) {
        targets[static_cast<std::size_t>(i)] = perm[i] % 2 == 0 ? 0 : 1;
        for (int c = 0; c < 2; ++c)
            shuffled.at(i, c) = msgs.at(perm[i], c);
    }
    Tape tape2(false);
    const Tensor& out2 = tape2.val(
        tape2.aggregate_smoothmax(tape2.leaf(shuffled), targets, 3));
    CHECK(out2.values == out.values);
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
    Rng rng(19);
    ParameterSet params = one_param("w", glorot_uniform(2, 2, rng));
    std::vector<double> before = params.at(0).value.values;
    params.zero_grad();
    params.adam_step(1e-3);
    CHECK(params.at(0).value.values == before);
}

TEST_CASE("adam first step has learning-rate magnitude for any gradient scale") {
    for (double scale : {1e-4, 1.0, 1e4}) {
        ParameterSet params = one_param("w", Tensor::zeros(1, 1));
        params.at(0).value.grad = {scale};
        params.adam_step(2e-4, 0.9, 0.999, 1e-12);
        CHECK(std::fabs(params.at(0).value.values[0]) ==
              doctest::Approx(2e-4).epsilon(1e-6));
    }
}

TEST_CASE("adam runs are bit-deterministic") {
    auto run = []() {
        Rng rng(23);
        ParameterSet params = one_param("w", glorot_uniform(3, 3, rng));
        for (int step = 0; step < 25; ++step) {
            for (std::size_t i = 0; i < params.at(0).value.size(); ++i)
                params.at(0).value.grad[i] =
                    std::sin(static_cast<double>(step + 1) * (double)(i + 1));
            params.adam_step(1e-3);
            params.zero_grad();
        }
        return params.at(0).value.values;
    };
    CHECK(run() == run());
}

TEST_CASE("grad_check is exact for quadratics") {
    ParameterSet params = one_param("x", Tensor::zeros(1, 3));
    params.at(0).value.values = {0.3, -1.2, 2.0};
    double err = grad_check(
        [](Tape& tape, const ParameterSet& p, GradSink* sink) {
            Tape::Id x = tape.param(p, 0, sink);
            // sum x_i^2 via w = x acting weirdly is unavailable; use linear
            // with the same values as fixed coefficients twice
            Tensor coeff = Tensor::zeros(3, 1);
            coeff.values = {1.0, 2.0, -0.5};
            Tape::Id s = tape.linear(x, tape.leaf(coeff), tape.leaf(Tensor::zeros(1, 1)));
            return tape.abs_diff(s, 1.0);
        },
        params, 1e-3, 3, 31);
    CHECK(err <= 1e-9);
}

TEST_CASE("grad_check reports large finite-difference steps honestly") {
    ParameterSet params = one_param("x", Tensor::zeros(1, 2));
    params.at(0).value.values = {0.4, -0.6};
    double err = grad_check(
        [](Tape& tape, const ParameterSet& p, GradSink* sink) {
            Tape::Id y = tape.mish(tape.param(p, 0, sink));
            Tensor proj = Tensor::zeros(2, 1);
            proj.values = {1.0, 1.0};
            Tape::Id s = tape.linear(y, tape.leaf(proj), tape.leaf(Tensor::zeros(1, 1)));
            return tape.abs_diff(s, 10.0);
        },
        params, 1e-1, 2, 37);
    CHECK(err > 1e-6);  // error surfaces instead of being masked
}

TEST_CASE("rng draws are platform-pinned") {
    Rng rng(42);
    CHECK(rng.next() == 13930160852258120406ULL);  // mt19937_64 reference value
    Rng bounded(1);
    for (int i = 0; i < 100; ++i) CHECK(bounded.below(7) < 7);
}

TEST_CASE("seventeen significant digits round-trip") {
    for (double v : {0.1, -1.0 / 3.0, 2e-4, 123456.789, 1e-300}) {
        std::stringstream ss(format_double17(v));
        double back;
        ss >> back;
        CHECK(back == v);
    }
}

TEST_CASE("shape mismatches are rejected") {
    Tape tape(false);
    Tape::Id x = tape.leaf(Tensor::zeros(2, 3));
    Tape::Id w = tape.leaf(Tensor::zeros(4, 2));
    Tape::Id b = tape.leaf(Tensor::zeros(1, 2));
    CHECK_THROWS_AS(tape.linear(x, w, b), ShapeMismatchError);
}

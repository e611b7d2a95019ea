#include "rgnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>

namespace rgnn {

double value_loss(int vstar, double v) {
    if (vstar == kInfiniteValue)
        throw InfiniteLabelError("cannot train on a dead-end label");
    return std::fabs(static_cast<double>(vstar) - v);
}

std::vector<std::vector<int>> make_batches(const std::vector<int>& vstars,
                                           int batch_size, std::uint64_t seed) {
    if (batch_size < 1) throw Error("batch size must be >= 1");
    std::map<int, std::vector<int>> strata;
    for (std::size_t i = 0; i < vstars.size(); ++i)
        strata[vstars[i]].push_back(static_cast<int>(i));

    Rng rng(seed);
    for (auto& [v, bucket] : strata) rng.shuffle(bucket);

    // interleave strata round-robin, then cut into batches
    std::vector<int> order;
    order.reserve(vstars.size());
    std::size_t round = 0;
    for (;;) {
        bool any = false;
        for (auto& [v, bucket] : strata) {
            if (round < bucket.size()) {
                order.push_back(bucket[round]);
                any = true;
            }
        }
        if (!any) break;
        ++round;
    }

    std::vector<std::vector<int>> batches;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(batch_size)) {
        std::size_t end = std::min(order.size(),
                                   begin + static_cast<std::size_t>(batch_size));
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

namespace {

struct PreparedSample {
    PreparedInput input;
    int vstar = 0;
};

std::vector<PreparedSample> prepare_all(const ValueModel& model,
                                        const std::vector<LabeledState>& states,
                                        int threads) {
    std::vector<PreparedSample> prepared(states.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < states.size(); i += stride) {
            if (states[i].vstar == kInfiniteValue)
                throw InfiniteLabelError("dataset contains a dead-end label");
            prepared[i].input = model.prepare(states[i].state);
            prepared[i].vstar = states[i].vstar;
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back(work, static_cast<std::size_t>(w),
                              static_cast<std::size_t>(threads));
        for (auto& th : pool) th.join();
    }
    return prepared;
}

// Per-item losses and gradients; items are independent and the gradient
// reduction happens in item order, so the result does not depend on the
// thread count.
double batch_gradients(const ValueModel& model,
                       const std::vector<PreparedSample>& samples,
                       const std::vector<int>& batch, int threads,
                       std::vector<GradSink>& sinks) {
    std::vector<double> losses(batch.size(), 0.0);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < batch.size(); i += stride) {
            const PreparedSample& sample = samples[static_cast<std::size_t>(batch[i])];
            Tape tape(true);
            Tape::Id value = model.value_on_tape(tape, sample.input, &sinks[i]);
            Tape::Id loss = tape.abs_diff(value, static_cast<double>(sample.vstar));
            tape.backward(loss, 1.0 / static_cast<double>(batch.size()));
            losses[i] = tape.scalar_value(loss);
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        const int workers = std::min<int>(threads, static_cast<int>(batch.size()));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, static_cast<std::size_t>(w),
                              static_cast<std::size_t>(workers));
        for (auto& th : pool) th.join();
    }
    double total = 0.0;
    for (double l : losses) total += l;
    return total / static_cast<double>(batch.size());
}

double mean_loss(const ValueModel& model,
                 const std::vector<PreparedSample>& samples, int threads) {
    if (samples.empty()) return 0.0;
    std::vector<double> losses(samples.size(), 0.0);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < samples.size(); i += stride)
            losses[i] = value_loss(samples[i].vstar,
                                   model.value_prepared(samples[i].input));
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back(work, static_cast<std::size_t>(w),
                              static_cast<std::size_t>(threads));
        for (auto& th : pool) th.join();
    }
    double total = 0.0;
    for (double l : losses) total += l;
    return total / static_cast<double>(samples.size());
}

}  // namespace

TrainReport train(const TrainConfig& config, const Vocabulary& domain_vocab,
                  const std::vector<LabeledState>& train_set,
                  const std::vector<LabeledState>& val_set,
                  ValueModel* best_model, std::ostream* metrics_csv) {
    if (train_set.empty()) throw EmptySpaceError("empty training set");
    if (config.seeds.empty()) throw Error("at least one seed is required");

    if (metrics_csv) *metrics_csv << "step,seed,train_loss,val_loss\n";

    TrainReport report;
    ValueModel best;
    double best_val = std::numeric_limits<double>::infinity();

    // input preparation is weight-independent and shared across seeds
    ValueModel probe = ValueModel::create(config.kind, config.t, config.net,
                                          domain_vocab, config.seeds[0]);
    probe.cumulative_rt = config.cumulative_rt;
    std::vector<PreparedSample> train_samples =
        prepare_all(probe, train_set, config.threads);
    std::vector<PreparedSample> val_samples =
        prepare_all(probe, val_set, config.threads);
    std::vector<int> train_values;
    for (const PreparedSample& s : train_samples) train_values.push_back(s.vstar);

    for (std::uint64_t seed : config.seeds) {
        ValueModel model = ValueModel::create(config.kind, config.t, config.net,
                                              domain_vocab, seed);
        model.cumulative_rt = config.cumulative_rt;

        TrainReport::SeedRun run;
        run.seed = seed;

        std::vector<GradSink> sinks;
        int step = 0;
        bool done = false;
        if (config.max_steps <= 0) {
            const double vloss = mean_loss(
                model, val_samples.empty() ? train_samples : val_samples,
                config.threads);
            run.val_curve.emplace_back(0, vloss);
            done = true;
        }
        for (std::uint64_t epoch = 0; !done; ++epoch) {
            auto batches = make_batches(train_values, config.batch_size,
                                        seed * 0x9e3779b97f4a7c15ULL + epoch);
            double epoch_loss = 0.0;
            std::size_t epoch_batches = 0;
            for (const auto& batch : batches) {
                if (step >= config.max_steps) {
                    done = true;
                    break;
                }
                while (sinks.size() < batch.size()) sinks.emplace_back(model.params);
                for (std::size_t i = 0; i < batch.size(); ++i) sinks[i].clear();

                const double batch_loss = batch_gradients(
                    model, train_samples, batch, config.threads, sinks);
                if (!std::isfinite(batch_loss)) {
                    run.aborted_nan = true;
                    done = true;
                    break;
                }
                model.params.zero_grad();
                for (std::size_t i = 0; i < batch.size(); ++i)
                    sinks[i].add_into(model.params);
                model.params.adam_step(config.lr, config.beta1, config.beta2,
                                       config.eps);
                ++step;
                epoch_loss += batch_loss;
                ++epoch_batches;
                run.train_curve.emplace_back(step, batch_loss);
                if (metrics_csv)
                    *metrics_csv << step << "," << seed << "," << batch_loss
                                 << ",\n";
                if (step >= config.max_steps) {
                    done = true;
                    break;
                }
            }
            if (epoch_batches > 0) {
                const double vloss =
                    val_samples.empty()
                        ? epoch_loss / static_cast<double>(epoch_batches)
                        : mean_loss(model, val_samples, config.threads);
                run.val_curve.emplace_back(step, vloss);
                if (metrics_csv)
                    *metrics_csv << step << "," << seed << ",," << vloss << "\n";
                if (config.stop_train_loss > 0.0 && step >= config.min_steps &&
                    epoch_loss / static_cast<double>(epoch_batches) <
                        config.stop_train_loss)
                    done = true;
            }
        }
        run.steps = step;
        run.final_val_loss =
            run.aborted_nan
                ? std::numeric_limits<double>::infinity()
                : (run.val_curve.empty() ? std::numeric_limits<double>::infinity()
                                         : run.val_curve.back().second);
        report.runs.push_back(run);
        if (!run.aborted_nan && run.final_val_loss < best_val) {
            best_val = run.final_val_loss;
            best = std::move(model);
            report.selected = static_cast<int>(report.runs.size()) - 1;
        }
    }
    if (report.selected < 0)
        throw Error("all training seeds diverged (non-finite loss)");
    if (best_model) *best_model = std::move(best);
    return report;
}

}  // namespace rgnn

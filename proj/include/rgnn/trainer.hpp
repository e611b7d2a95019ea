#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rgnn/network.hpp"
#include "rgnn/state_space.hpp"

namespace rgnn {

struct TrainConfig {
    ModelKind kind = ModelKind::rgnn_t;
    int t = 1;
    bool cumulative_rt = false;
    RgnnConfig net;
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch_size = 16;
    int max_steps = 5000;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    int threads = 1;
    // optional convergence exit: stop a seed once the epoch-mean training
    // loss drops below this (0 disables), but not before min_steps
    double stop_train_loss = 0.0;
    int min_steps = 0;
};

struct TrainReport {
    struct SeedRun {
        std::uint64_t seed = 0;
        std::vector<std::pair<int, double>> train_curve;  // (step, batch loss)
        std::vector<std::pair<int, double>> val_curve;    // (step, mean loss)
        double final_val_loss = 0.0;
        int steps = 0;
        bool aborted_nan = false;
    };
    std::vector<SeedRun> runs;
    int selected = -1;  // index into runs
};

// |V* - V| with the subgradient at zero taken as zero.
double value_loss(int vstar, double v);

// Round-robin over the V* strata (shuffled within each stratum) so batches
// carry as many distinct values as possible; every index appears exactly
// once per epoch.
std::vector<std::vector<int>> make_batches(const std::vector<int>& vstars,
                                           int batch_size, std::uint64_t seed);

// Supervised training over the labeled states; one model per seed, the one
// with the lowest final validation loss wins.
TrainReport train(const TrainConfig& config, const Vocabulary& domain_vocab,
                  const std::vector<LabeledState>& train_set,
                  const std::vector<LabeledState>& val_set,
                  ValueModel* best_model, std::ostream* metrics_csv = nullptr);

}  // namespace rgnn

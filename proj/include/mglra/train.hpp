#pragma once

#include "mglra/model.hpp"
#include "mglra/optimizer.hpp"

namespace mglra {

struct EvalResult {
    Metrics metrics;
    double mean_loss = 0.0; // mean -log p[y] over utterances
};

// Read-only evaluation, masking disabled (unless the model config opts into
// eval-time masking, which then uses a fixed stream derived from `seed`).
// Parallelizes over dialogues; thread count capped by MGLRA_THREADS.
EvalResult evaluate(const MglraModel& model, const std::vector<Dialogue>& dialogues,
                    std::uint64_t seed = 0);

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_weighted_accuracy = 0.0;
    double val_weighted_f1 = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0; // 1-based; 0 = no epochs ran
    Metrics best_val_metrics;
    std::size_t steps_run = 0;
};

// Algorithm-1 training loop: seeded shuffle, per-batch forward over each
// dialogue, cross-entropy over the batch utterances, backward, AdamW step,
// fresh mask sample per step. Keeps the best validation weighted-F1
// parameters and restores them on return.
TrainResult train(MglraModel& model, const Dataset& train_data, const Dataset& val_data,
                  const TrainConfig& config);

std::size_t eval_thread_cap();

} // namespace mglra

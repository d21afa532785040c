#include "mglra/train.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace mglra {

std::size_t eval_thread_cap() {
    std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MGLRA_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0) cap = static_cast<std::size_t>(parsed);
    }
    return cap;
}

EvalResult evaluate(const MglraModel& model, const std::vector<Dialogue>& dialogues,
                    std::uint64_t seed) {
    const std::size_t k = model.config.n_classes;
    const std::size_t n = dialogues.size();
    if (n == 0) throw ContractError("evaluate: no dialogues");

    // Per-dialogue partial results merged in dialogue order, so threading
    // cannot change any output bit.
    std::vector<std::vector<std::vector<std::size_t>>> partial_confusion(
        n, std::vector<std::vector<std::size_t>>(k, std::vector<std::size_t>(k, 0)));
    std::vector<double> partial_loss_sum(n, 0.0);
    std::vector<std::size_t> partial_count(n, 0);

    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto run_range = [&](std::size_t begin, std::size_t end) {
        try {
            for (std::size_t di = begin; di < end; ++di) {
                const Dialogue& d = dialogues[di];
                RngStream mask_rng = RngStream(seed).substream("eval-mask").substream(di);
                const MaskMode mode =
                    model.config.mask_at_eval ? MaskMode::Sample : MaskMode::Disabled;
                auto out = model.forward(d, mode, &mask_rng);
                const auto preds = argmax_rows(out.probs);
                for (std::size_t u = 0; u < d.length(); ++u) {
                    const std::size_t truth = d.utterances[u].label;
                    partial_confusion[di][truth][preds[u]] += 1;
                    const double p = std::max(out.probs.at(u, truth), 1e-12);
                    partial_loss_sum[di] += -std::log(p);
                }
                partial_count[di] = d.length();
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    const std::size_t threads = std::min(eval_thread_cap(), n);
    if (threads <= 1) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::vector<std::size_t>> confusion(k, std::vector<std::size_t>(k, 0));
    double loss_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t di = 0; di < n; ++di) {
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t p = 0; p < k; ++p) confusion[t][p] += partial_confusion[di][t][p];
        loss_sum += partial_loss_sum[di];
        count += partial_count[di];
    }

    EvalResult result;
    result.metrics = metrics_from_confusion(confusion);
    result.mean_loss = loss_sum / static_cast<double>(count);
    return result;
}

namespace {

std::vector<std::vector<double>> snapshot_values(const std::vector<NamedTensor>& params) {
    std::vector<std::vector<double>> out;
    out.reserve(params.size());
    for (const auto& p : params) out.push_back(p.tensor.values());
    return out;
}

void restore_values(std::vector<NamedTensor>& params,
                    const std::vector<std::vector<double>>& snapshot) {
    for (std::size_t i = 0; i < params.size(); ++i)
        params[i].tensor.mutable_values() = snapshot[i];
}

} // namespace

TrainResult train(MglraModel& model, const Dataset& train_data, const Dataset& val_data,
                  const TrainConfig& config) {
    config.validate();
    TrainResult result;
    if (config.epochs == 0) return result;

    auto params = model.parameters();
    Adam optimizer(AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay},
                   params);
    RngStream root(config.seed);
    RngStream shuffle_rng = root.substream("shuffle");
    RngStream mask_rng = root.substream("mask");

    std::vector<std::size_t> order(train_data.dialogues.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<std::vector<double>> best_snapshot;
    double best_f1 = -1.0;
    bool step_cap_hit = false;

    for (std::size_t epoch = 1; epoch <= config.epochs && !step_cap_hit; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        // Fisher-Yates from the shuffle stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = shuffle_rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }

        double epoch_loss_sum = 0.0;
        std::size_t epoch_utterances = 0;
        for (std::size_t batch_start = 0; batch_start < order.size();
             batch_start += config.batch_size) {
            const std::size_t batch_end =
                std::min(order.size(), batch_start + config.batch_size);
            Tape tape;
            TapeScope scope(tape);
            Tensor loss_sum;
            std::size_t batch_utterances = 0;
            for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
                const Dialogue& d = train_data.dialogues[order[bi]];
                try {
                    const MaskMode mode =
                        model.config.mask_rate > 0.0 ? MaskMode::Sample : MaskMode::Disabled;
                    auto out = model.forward(d, mode, &mask_rng);
                    std::vector<std::size_t> labels(d.length());
                    for (std::size_t u = 0; u < d.length(); ++u)
                        labels[u] = d.utterances[u].label;
                    Tensor picked = gather_per_row(out.probs, labels);
                    Tensor dlg_loss = sum_all(neg_log_clamped(picked));
                    loss_sum = loss_sum.defined() ? add(loss_sum, dlg_loss) : dlg_loss;
                    batch_utterances += d.length();
                } catch (const std::exception& e) {
                    throw ContractError("training aborted at epoch " + std::to_string(epoch) +
                                        ", batch " + std::to_string(batch_start / config.batch_size) +
                                        ", dialogue " + d.dialogue_id + ": " + e.what());
                }
            }
            Tensor loss =
                affine(loss_sum, 1.0 / static_cast<double>(batch_utterances), 0.0);
            epoch_loss_sum += loss.item() * static_cast<double>(batch_utterances);
            epoch_utterances += batch_utterances;
            backward(loss);
            optimizer.step();
            ++result.steps_run;
            if (config.max_steps > 0 && result.steps_run >= config.max_steps) {
                step_cap_hit = true;
                break;
            }
        }

        EvalResult val = evaluate(model, val_data.dialogues, config.seed);
        const auto epoch_end = std::chrono::steady_clock::now();
        EpochLog log;
        log.epoch = epoch;
        log.train_loss = epoch_loss_sum / static_cast<double>(epoch_utterances);
        log.val_weighted_accuracy = val.metrics.weighted_accuracy;
        log.val_weighted_f1 = val.metrics.weighted_f1;
        log.seconds = std::chrono::duration<double>(epoch_end - epoch_start).count();
        result.log.push_back(log);

        if (val.metrics.weighted_f1 > best_f1) {
            best_f1 = val.metrics.weighted_f1;
            best_snapshot = snapshot_values(params);
            result.best_epoch = epoch;
            result.best_val_metrics = val.metrics;
        }
    }

    if (!best_snapshot.empty()) restore_values(params, best_snapshot);
    return result;
}

} // namespace mglra

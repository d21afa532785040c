#pragma once

#include <string>
#include <vector>

#include "mglra/config.hpp"

namespace mglra {

// Exit codes shared by the command surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 1;
inline constexpr int kExitIoUsage = 2;

// Writes train/val/test JSONL plus manifest.json into out_dir.
void cmd_generate(const std::string& spec_path, const std::string& out_dir);

// Full training run: writes model.bin, metrics.json (test metrics),
// epochs.csv, confusion.csv, embeddings.tsv and effective_config.json into
// the config's out_dir. Returns the test metrics JSON text.
std::string cmd_train(const std::string& config_path);

// One train/eval per value with a shared seed; appends rows
// value,weighted_accuracy,weighted_f1,wall_seconds to <out_dir>/sweep.csv.
void cmd_sweep(const std::string& parameter, const std::vector<double>& values,
               const std::string& config_path);

// Re-evaluates a saved model on a feature file; writes metrics.json,
// confusion.csv, embeddings.tsv, nodes.csv and graph.csv into out_dir.
void cmd_inspect(const std::string& model_path, const std::string& features_path,
                 const std::string& out_dir);

} // namespace mglra

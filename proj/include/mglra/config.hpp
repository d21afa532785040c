#pragma once

#include <cstdint>
#include <string>

#include "mglra/data.hpp"

namespace mglra {

enum class PartnerCombine { Average, Sum };

// Architecture dimensions and pipeline hyperparameters. Dataset-driven fields
// (n_classes, n_speakers, feature widths) are filled from the dataset header
// before the model is built.
struct ModelConfig {
    std::size_t d_t = 100;
    std::size_t d_a = 100;
    std::size_t d_v = 512;
    std::size_t n_classes = 0;
    std::size_t n_speakers = 0;

    std::size_t hidden_dim = 100;     // LSTM output width, shared by all modalities
    std::size_t filter_dim = 100;     // node value width P in the filter graph
    std::size_t relation_dim = 100;   // relation embedding width T
    std::size_t mrfa_iterations = 3;  // T^F
    std::size_t n_heads = 10;
    std::size_t head_dim = 10;        // d_m; heads concatenate to n_heads * head_dim
    std::size_t speaker_dim = 0;      // 0 = use n_speakers
    std::size_t gcn_dim = 100;        // D_g
    std::size_t mlp_hidden = 64;      // D_hid

    double aleph = 0.5;               // inter-modal edge attenuation
    double mask_rate = 0.7;
    bool scaled_attention = false;    // optional 1/sqrt(d) factor in dot-product attention
    bool mask_at_eval = false;        // ablation switch; default trains-only masking
    PartnerCombine partner_combine = PartnerCombine::Average;

    std::size_t effective_speaker_dim() const { return speaker_dim == 0 ? n_speakers : speaker_dim; }
    void adopt_header(const DatasetHeader& h);
    void validate() const;
};

struct TrainConfig {
    double learning_rate = 1e-4;
    double weight_decay = 5e-5;
    std::size_t batch_size = 32; // dialogues per step
    std::size_t epochs = 70;
    std::size_t max_steps = 0;   // 0 = no step cap; otherwise stops at whichever limit hits first
    std::uint64_t seed = 1;

    void validate() const;
};

struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    std::string features_dir;    // directory containing train/val/test .jsonl
    std::string synthetic_spec;  // alternative to features_dir
    std::string out_dir = "out";

    void validate() const;
};

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& config, const std::string& path);
std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);

// Stable 64-bit digest of the effective configuration, stored in model files.
std::uint64_t config_hash(const RunConfig& config);

} // namespace mglra

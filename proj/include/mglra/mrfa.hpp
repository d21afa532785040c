#pragma once

#include <array>

#include "mglra/config.hpp"
#include "mglra/context_encoder.hpp"
#include "mglra/crossmodal.hpp"

namespace mglra {

// Per-modality store of refined feature entries; one entry per utterance.
// Initialized from the filtered features, then overwritten by the GRU output
// after every alignment round. Lives within a single forward pass.
struct MemoryBlock {
    Modality modality = Modality::Text;
    Tensor entries; // entry_count x feature_dim
    bool initialized = false;

    std::size_t entry_count() const { return entries.rows(); }
    std::size_t feature_dim() const { return entries.cols(); }
};

struct MrfaParams {
    std::size_t iterations = 3; // T^F
    std::size_t feature_dim = 0;
    // Entry scorer per modality; a width-1 convolution over entries, i.e. one
    // linear functional applied per entry.
    Tensor entry_scorer[3]; // feature_dim x 1
    // Cross-modal attention per ordered (modality, partner) pair; partner slot
    // p holds modality (m + 1 + p) % 3.
    MhaParams attention[3][2];
    GruParams refiner[3];
    PartnerCombine partner_combine = PartnerCombine::Average;

    static MrfaParams init(std::size_t iterations, std::size_t feature_dim, std::size_t n_heads,
                           std::size_t head_dim, bool scaled_attention, PartnerCombine combine,
                           RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

MemoryBlock init_memory(Modality modality, const Tensor& filtered);

// In-place form; rejects re-initialization of a live block.
void init_memory(MemoryBlock& block, const Tensor& filtered);

// Entry attention weights, 1 x entry_count; softmax of the per-entry scores.
Tensor entry_attention(const MrfaParams& params, const MemoryBlock& block);

// Salient readout: weights x entries, 1 x feature_dim.
Tensor aggregate(const MemoryBlock& block, const Tensor& weights);

// Replaces the block content with the refined sequence; shape must match.
void write_back(MemoryBlock& block, const Tensor& refined);

// One synchronous alignment round: all three refined sequences are computed
// from the round-start memories before any write-back, so modality order
// cannot change the result.
void mrfa_round(const MrfaParams& params, std::array<MemoryBlock, 3>& blocks);

// Full alignment: initialize from the filtered sequences, run T^F rounds,
// return the final per-utterance representations per modality.
std::array<Tensor, 3> run_mrfa(const MrfaParams& params,
                               const std::array<Tensor, 3>& filtered);

} // namespace mglra

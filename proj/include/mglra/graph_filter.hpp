#pragma once

#include <array>
#include <vector>

#include "mglra/gradcheck.hpp"
#include "mglra/tensor.hpp"

namespace mglra {

// Star graph per utterance: node 0 is the multimodal center, nodes 1..3 the
// text/audio/vision nodes. Relations 0..2 are text-, audio- and
// visual-multimodal.
inline constexpr std::size_t kFilterCenter = 0;
inline constexpr std::size_t kFilterNodes = 4;
inline constexpr std::size_t kFilterRelations = 3;

struct FilterParams {
    std::size_t hidden_dim = 0;   // width of each contextual input vector
    std::size_t value_dim = 0;    // P
    std::size_t relation_dim = 0; // T

    Tensor relation_embeddings;   // 3 x T
    Tensor proj_center;           // 3*hidden x P
    Tensor proj_modality[3];      // hidden x P
    Tensor pair_transform;        // (2P + T) x P, shared across all pairs
    Tensor score_vector[3];       // P x 1 per relation

    static FilterParams init(std::size_t hidden_dim, std::size_t value_dim,
                             std::size_t relation_dim, RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct FilterPair {
    std::size_t neighbor = 0;
    std::size_t relation = 0;
};

// Node value matrix V (4 x P) for one utterance from its three contextual
// vectors (each 1 x hidden).
Tensor build_filter_values(const FilterParams& params, const Tensor& x_t, const Tensor& x_a,
                           const Tensor& x_v);

// c_ijk = [V_i || V_j || C_k] W
Tensor relation_vector(const FilterParams& params, const Tensor& values, std::size_t i,
                       std::size_t j, std::size_t k);

// Attention weights over the joint (neighbor, relation) set of node i;
// 1 x pairs.size(), rows sum to 1.
Tensor filter_attention(const FilterParams& params, const Tensor& values, std::size_t node,
                        const std::vector<FilterPair>& pairs);

// h_i = sum over pairs of alpha * c; 1 x P.
Tensor filtered_feature(const FilterParams& params, const Tensor& values, std::size_t node,
                        const std::vector<FilterPair>& pairs);

// Neighborhood of a node in the per-utterance star graph: the center sees the
// three unimodal nodes, a unimodal node sees the center; every edge carries
// its single modality-multimodal relation.
std::vector<FilterPair> filter_neighborhood(std::size_t node);

// Sequence-level filtering: contextual L x hidden inputs per modality to
// denoised L x P outputs (the unimodal node features).
std::array<Tensor, 3> filter_sequences(const FilterParams& params, const Tensor& seq_t,
                                       const Tensor& seq_a, const Tensor& seq_v);

} // namespace mglra

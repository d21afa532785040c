#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mglra/context_encoder.hpp"
#include "mglra/gradcheck.hpp"
#include "mglra/tensor.hpp"

namespace mglra {

struct SpeakerTable {
    Tensor embeddings; // n_speakers x speaker_dim
    Tensor projection; // speaker_dim x feature_dim (W_s)

    static SpeakerTable init(std::size_t n_speakers, std::size_t speaker_dim,
                             std::size_t feature_dim, RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// X^S = W_s S_i + X_m, per utterance row.
Tensor embed_speaker(const SpeakerTable& table, const Tensor& aligned,
                     const std::vector<std::size_t>& speakers);

struct GraphNode {
    std::string dialogue_id;
    std::size_t utterance_index = 0;
    Modality modality = Modality::Text;
    std::size_t speaker_id = 0;
    std::size_t label = 0;
};

// Node features for one dialogue, after speaker embedding; one L x feature_dim
// matrix per modality.
struct DialogueNodes {
    std::string dialogue_id;
    std::array<Tensor, 3> features;
    std::vector<std::size_t> speakers;
    std::vector<std::size_t> labels;
};

// Conversation graph over utterance x modality nodes, utterance-major order
// (node 3u + modality). Edges connect every node pair within the same
// dialogue; the adjacency carries angular-similarity weights, attenuated by
// aleph across modalities, zero diagonal.
struct ConversationGraph {
    std::vector<GraphNode> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> dialogue_blocks; // [start, end)
    Tensor features;  // N x feature_dim
    Tensor adjacency; // N x N, symmetric
    std::vector<std::uint8_t> node_masked; // N
    std::vector<std::uint8_t> edge_masked; // N*N, symmetric
    bool any_node_masked = false;

    std::size_t n_nodes() const { return nodes.size(); }
    bool same_dialogue(std::size_t i, std::size_t j) const;
};

ConversationGraph build_graph(const std::vector<DialogueNodes>& dialogues, double aleph);

// Scalar edge-weight contracts (plain math, no tape). Zero-norm inputs fall
// back to similarity 0 and bump the numeric warning counter.
double edge_weight_intra(const std::vector<double>& a, const std::vector<double>& b);
double edge_weight_inter(const std::vector<double>& a, const std::vector<double>& b, double aleph);

// Samples node and edge masks in place (nodes first, then edges in (i < j)
// order per dialogue block). Disabled => identity, no rng consumed.
void apply_mask(ConversationGraph& graph, double mask_rate, RngStream& rng, bool enabled = true);

enum class PropagationPath { Auto, Dense, Sparse };

struct MaskedGcnParams {
    Tensor w1;         // feature_dim x gcn_dim
    Tensor w2;         // gcn_dim x gcn_dim
    Tensor mask_token; // 1 x feature_dim, learnable replacement for masked nodes

    static MaskedGcnParams init(std::size_t feature_dim, std::size_t gcn_dim, RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// Node features after mask-token substitution; identity when nothing is
// masked.
Tensor masked_node_features(const MaskedGcnParams& params, const ConversationGraph& graph);

// y = P~ x with P~ = (D+I)^{-1/2} (A_[M] + I) (D+I)^{-1/2}, where A_[M] is the
// adjacency restricted to unmasked same-dialogue edges and D its row sums.
// Registers exact gradients for both x and the adjacency. Auto picks the
// sparse path when unmasked density < 50%.
Tensor laplacian_matmul(const ConversationGraph& graph, const Tensor& x,
                        PropagationPath path = PropagationPath::Auto);

// Two-layer propagation: relu(P~ H W1), then P~ H1 W2.
Tensor renormalized_propagation(const MaskedGcnParams& params, const ConversationGraph& graph,
                                PropagationPath path = PropagationPath::Auto);

// Same computation, returning every stage for readouts that combine the
// propagation input with both layer outputs.
struct PropagationTrace {
    Tensor input;  // node features after mask substitution
    Tensor layer1; // relu(P~ H W1)
    Tensor layer2; // P~ H1 W2
};
PropagationTrace renormalized_propagation_trace(const MaskedGcnParams& params,
                                                const ConversationGraph& graph,
                                                PropagationPath path = PropagationPath::Auto);

// Dense P~ matrix (row-major), for inspection and test oracles.
std::vector<double> dense_renorm_laplacian(const ConversationGraph& graph);

} // namespace mglra

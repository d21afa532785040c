#pragma once

#include "mglra/classifier.hpp"
#include "mglra/config.hpp"
#include "mglra/context_encoder.hpp"
#include "mglra/data.hpp"
#include "mglra/fusion_graph.hpp"
#include "mglra/graph_filter.hpp"
#include "mglra/mrfa.hpp"

namespace mglra {

enum class MaskMode { Disabled, Sample };

// The full pipeline: per-modality LSTM context encoding, graph attention
// filtering, memory-based recursive alignment with cross-modal attention,
// speaker embedding, masked GCN fusion and the MLP head.
struct MglraModel {
    ModelConfig config;
    LstmParams encoder[3];
    FilterParams filter;
    MrfaParams mrfa;
    SpeakerTable speakers;
    MaskedGcnParams gcn;
    MlpParams mlp;

    static MglraModel init(const ModelConfig& config, RngStream& rng);

    std::vector<NamedTensor> parameters() const;

    struct DialogueOutput {
        ConversationGraph graph;
        Tensor node_embeddings; // 3L x gcn_dim
        Tensor probs;           // L x n_classes
    };

    // One dialogue end to end. mask_rng must be non-null when mask is
    // MaskMode::Sample.
    DialogueOutput forward(const Dialogue& dialogue, MaskMode mask, RngStream* mask_rng,
                           PropagationPath path = PropagationPath::Auto) const;
};

} // namespace mglra

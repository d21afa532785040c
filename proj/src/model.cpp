#include "mglra/model.hpp"

namespace mglra {

MglraModel MglraModel::init(const ModelConfig& config, RngStream& rng) {
    config.validate();
    MglraModel model;
    model.config = config;
    const std::size_t input_dims[3] = {config.d_t, config.d_a, config.d_v};
    for (int m = 0; m < 3; ++m)
        model.encoder[m] = LstmParams::init(input_dims[m], config.hidden_dim, rng);
    model.filter =
        FilterParams::init(config.hidden_dim, config.filter_dim, config.relation_dim, rng);
    model.mrfa = MrfaParams::init(config.mrfa_iterations, config.filter_dim, config.n_heads,
                                  config.head_dim, config.scaled_attention,
                                  config.partner_combine, rng);
    model.speakers = SpeakerTable::init(config.n_speakers, config.effective_speaker_dim(),
                                        config.filter_dim, rng);
    model.gcn = MaskedGcnParams::init(config.filter_dim, config.gcn_dim, rng);
    // The classifier reads, per utterance, the three modality nodes of the
    // propagation input plus both layer outputs.
    const std::size_t readout_dim = 3 * (config.filter_dim + 2 * config.gcn_dim);
    model.mlp = MlpParams::init(readout_dim, config.mlp_hidden, config.n_classes, rng);
    return model;
}

std::vector<NamedTensor> MglraModel::parameters() const {
    std::vector<NamedTensor> out;
    for (int m = 0; m < 3; ++m)
        encoder[m].collect(std::string("encoder.") + modality_name(static_cast<Modality>(m)), out);
    filter.collect("filter", out);
    mrfa.collect("mrfa", out);
    speakers.collect("speakers", out);
    gcn.collect("gcn", out);
    mlp.collect("mlp", out);
    return out;
}

namespace {

Tensor modality_matrix(const Dialogue& dialogue, Modality m, std::size_t expected_dim) {
    const std::size_t len = dialogue.length();
    std::vector<double> data;
    data.reserve(len * expected_dim);
    for (const auto& u : dialogue.utterances) {
        const std::vector<double>& v = m == Modality::Text    ? u.text
                                       : m == Modality::Audio ? u.audio
                                                              : u.vision;
        if (v.size() != expected_dim)
            throw ShapeError(std::string("dialogue ") + dialogue.dialogue_id + ": " +
                             modality_name(m) + " width " + std::to_string(v.size()) +
                             " does not match configured " + std::to_string(expected_dim));
        data.insert(data.end(), v.begin(), v.end());
    }
    return Tensor::from_data(len, expected_dim, std::move(data));
}

} // namespace

MglraModel::DialogueOutput MglraModel::forward(const Dialogue& dialogue, MaskMode mask,
                                               RngStream* mask_rng, PropagationPath path) const {
    if (dialogue.utterances.empty())
        throw ContractError("forward: empty dialogue " + dialogue.dialogue_id);
    if (mask == MaskMode::Sample && mask_rng == nullptr)
        throw ContractError("forward: mask sampling requested without an rng stream");

    const std::size_t len = dialogue.length();
    std::vector<std::size_t> speaker_ids(len), labels(len);
    for (std::size_t u = 0; u < len; ++u) {
        speaker_ids[u] = dialogue.utterances[u].speaker_id;
        labels[u] = dialogue.utterances[u].label;
    }

    std::array<Tensor, 3> context;
    for (std::size_t m = 0; m < 3; ++m) {
        const std::size_t dims[3] = {config.d_t, config.d_a, config.d_v};
        Tensor raw = modality_matrix(dialogue, static_cast<Modality>(m), dims[m]);
        context[m] = encode_context(encoder[m], raw);
    }

    std::array<Tensor, 3> filtered = filter_sequences(filter, context[0], context[1], context[2]);
    std::array<Tensor, 3> aligned = run_mrfa(mrfa, filtered);

    DialogueNodes nodes;
    nodes.dialogue_id = dialogue.dialogue_id;
    nodes.speakers = speaker_ids;
    nodes.labels = labels;
    for (std::size_t m = 0; m < 3; ++m)
        nodes.features[m] = embed_speaker(speakers, aligned[m], speaker_ids);

    DialogueOutput out;
    out.graph = build_graph({nodes}, config.aleph);
    if (mask == MaskMode::Sample) {
        apply_mask(out.graph, config.mask_rate, *mask_rng, true);
    }
    PropagationTrace trace = renormalized_propagation_trace(gcn, out.graph, path);
    out.node_embeddings = trace.layer2;
    // Utterance-major node order makes the per-utterance readout a plain
    // reshape: rows 3u..3u+2 fold into one row.
    Tensor per_node = concat_cols({trace.input, trace.layer1, trace.layer2});
    Tensor per_utterance = reshape(per_node, len, 3 * per_node.cols());
    out.probs = classify_probs(mlp, per_utterance);
    return out;
}

} // namespace mglra

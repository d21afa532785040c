#include "mglra/graph_filter.hpp"

namespace mglra {

FilterParams FilterParams::init(std::size_t hidden_dim, std::size_t value_dim,
                                std::size_t relation_dim, RngStream& rng) {
    FilterParams p;
    p.hidden_dim = hidden_dim;
    p.value_dim = value_dim;
    p.relation_dim = relation_dim;
    p.relation_embeddings = seeded_uniform_init(rng, kFilterRelations, relation_dim,
                                                xavier_scale(kFilterRelations, relation_dim));
    p.proj_center = seeded_uniform_init(rng, 3 * hidden_dim, value_dim,
                                        xavier_scale(3 * hidden_dim, value_dim));
    for (int m = 0; m < 3; ++m)
        p.proj_modality[m] =
            seeded_uniform_init(rng, hidden_dim, value_dim, xavier_scale(hidden_dim, value_dim));
    const std::size_t pair_in = 2 * value_dim + relation_dim;
    p.pair_transform = seeded_uniform_init(rng, pair_in, value_dim,
                                           xavier_scale(pair_in, value_dim));
    for (int k = 0; k < 3; ++k)
        p.score_vector[k] = seeded_uniform_init(rng, value_dim, 1, xavier_scale(value_dim, 1));
    return p;
}

void FilterParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    out.push_back({prefix + ".relations", relation_embeddings});
    out.push_back({prefix + ".proj_center", proj_center});
    out.push_back({prefix + ".proj_text", proj_modality[0]});
    out.push_back({prefix + ".proj_audio", proj_modality[1]});
    out.push_back({prefix + ".proj_vision", proj_modality[2]});
    out.push_back({prefix + ".pair_transform", pair_transform});
    out.push_back({prefix + ".score_text_mm", score_vector[0]});
    out.push_back({prefix + ".score_audio_mm", score_vector[1]});
    out.push_back({prefix + ".score_vision_mm", score_vector[2]});
}

Tensor build_filter_values(const FilterParams& params, const Tensor& x_t, const Tensor& x_a,
                           const Tensor& x_v) {
    Tensor center = matmul(concat_cols({x_t, x_a, x_v}), params.proj_center);
    Tensor vt = matmul(x_t, params.proj_modality[0]);
    Tensor va = matmul(x_a, params.proj_modality[1]);
    Tensor vv = matmul(x_v, params.proj_modality[2]);
    return concat_rows({center, vt, va, vv});
}

Tensor relation_vector(const FilterParams& params, const Tensor& values, std::size_t i,
                       std::size_t j, std::size_t k) {
    if (i >= kFilterNodes || j >= kFilterNodes)
        throw ContractError("relation_vector: node index out of range");
    if (k >= kFilterRelations) throw ContractError("relation_vector: relation index out of range");
    Tensor vi = slice_rows(values, i, 1);
    Tensor vj = slice_rows(values, j, 1);
    Tensor ck = slice_rows(params.relation_embeddings, k, 1);
    return matmul(concat_cols({vi, vj, ck}), params.pair_transform);
}

std::vector<FilterPair> filter_neighborhood(std::size_t node) {
    if (node >= kFilterNodes) throw ContractError("filter_neighborhood: node index out of range");
    if (node == kFilterCenter) {
        return {FilterPair{1, 0}, FilterPair{2, 1}, FilterPair{3, 2}};
    }
    return {FilterPair{kFilterCenter, node - 1}};
}

namespace {

// Scores and relation vectors for the pairs of one node; shared by the
// attention and aggregation entry points.
struct PairEvaluation {
    std::vector<Tensor> relation_vectors;
    Tensor alphas; // 1 x pairs.size()
};

PairEvaluation evaluate_pairs(const FilterParams& params, const Tensor& values, std::size_t node,
                              const std::vector<FilterPair>& pairs) {
    if (pairs.empty()) throw ContractError("filter attention: node has an empty neighborhood");
    PairEvaluation ev;
    std::vector<Tensor> scores;
    scores.reserve(pairs.size());
    for (const auto& pr : pairs) {
        Tensor c = relation_vector(params, values, node, pr.neighbor, pr.relation);
        scores.push_back(matmul(c, params.score_vector[pr.relation]));
        ev.relation_vectors.push_back(std::move(c));
    }
    ev.alphas = softmax_rows(concat_cols(scores));
    return ev;
}

} // namespace

Tensor filter_attention(const FilterParams& params, const Tensor& values, std::size_t node,
                        const std::vector<FilterPair>& pairs) {
    return evaluate_pairs(params, values, node, pairs).alphas;
}

Tensor filtered_feature(const FilterParams& params, const Tensor& values, std::size_t node,
                        const std::vector<FilterPair>& pairs) {
    PairEvaluation ev = evaluate_pairs(params, values, node, pairs);
    return matmul(ev.alphas, concat_rows(ev.relation_vectors));
}

std::array<Tensor, 3> filter_sequences(const FilterParams& params, const Tensor& seq_t,
                                       const Tensor& seq_a, const Tensor& seq_v) {
    const std::size_t len = seq_t.rows();
    if (seq_a.rows() != len || seq_v.rows() != len)
        throw ShapeError("filter_sequences: modality sequence lengths differ");
    std::array<std::vector<Tensor>, 3> rows;
    for (std::size_t u = 0; u < len; ++u) {
        Tensor values = build_filter_values(params, slice_rows(seq_t, u, 1),
                                            slice_rows(seq_a, u, 1), slice_rows(seq_v, u, 1));
        for (std::size_t m = 0; m < 3; ++m) {
            const std::size_t node = m + 1;
            rows[m].push_back(filtered_feature(params, values, node, filter_neighborhood(node)));
        }
    }
    return {concat_rows(rows[0]), concat_rows(rows[1]), concat_rows(rows[2])};
}

} // namespace mglra

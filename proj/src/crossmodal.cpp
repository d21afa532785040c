#include "mglra/crossmodal.hpp"

#include <cmath>

namespace mglra {

MhaParams MhaParams::init(std::size_t n_heads, std::size_t model_dim, std::size_t head_dim,
                          bool scaled, RngStream& rng) {
    MhaParams p;
    p.n_heads = n_heads;
    p.model_dim = model_dim;
    p.head_dim = head_dim;
    p.scaled = scaled;
    const double scale = xavier_scale(model_dim, head_dim);
    for (std::size_t h = 0; h < n_heads; ++h) {
        p.w_query.push_back(seeded_uniform_init(rng, model_dim, head_dim, scale));
        p.w_key.push_back(seeded_uniform_init(rng, model_dim, head_dim, scale));
        p.w_value.push_back(seeded_uniform_init(rng, model_dim, head_dim, scale));
    }
    return p;
}

void MhaParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    for (std::size_t h = 0; h < n_heads; ++h) {
        const std::string head = prefix + ".head" + std::to_string(h);
        out.push_back({head + ".wq", w_query[h]});
        out.push_back({head + ".wk", w_key[h]});
        out.push_back({head + ".wv", w_value[h]});
    }
}

Tensor head_attention(const MhaParams& params, const Tensor& query_source,
                      const Tensor& key_value_source, std::size_t head) {
    if (head >= params.n_heads) throw ContractError("head_attention: head index out of range");
    if (query_source.cols() != params.model_dim || key_value_source.cols() != params.model_dim) {
        throw ShapeError("head_attention: source width " + query_source.shape_str() + "/" +
                         key_value_source.shape_str() + " does not match model_dim " +
                         std::to_string(params.model_dim));
    }
    Tensor q = matmul(query_source, params.w_query[head]);
    Tensor k = matmul(key_value_source, params.w_key[head]);
    Tensor v = matmul(key_value_source, params.w_value[head]);
    Tensor scores = matmul(q, transpose(k));
    if (params.scaled) {
        scores = affine(scores, 1.0 / std::sqrt(static_cast<double>(params.head_dim)), 0.0);
    }
    return matmul(softmax_rows(scores), v);
}

Tensor multi_head(const MhaParams& params, const Tensor& query_source,
                  const Tensor& key_value_source) {
    std::vector<Tensor> heads;
    heads.reserve(params.n_heads);
    for (std::size_t h = 0; h < params.n_heads; ++h)
        heads.push_back(head_attention(params, query_source, key_value_source, h));
    return concat_cols(heads);
}

GruParams GruParams::init(std::size_t input_dim, std::size_t hidden_dim, RngStream& rng) {
    GruParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    const double wi = xavier_scale(input_dim, hidden_dim);
    const double wh = xavier_scale(hidden_dim, hidden_dim);
    p.w_update = seeded_uniform_init(rng, input_dim, hidden_dim, wi);
    p.u_update = seeded_uniform_init(rng, hidden_dim, hidden_dim, wh);
    // update gate starts mostly closed so refinement begins near the prior
    p.b_update =
        Tensor::from_data(1, hidden_dim, std::vector<double>(hidden_dim, -4.0), true);
    p.w_reset = seeded_uniform_init(rng, input_dim, hidden_dim, wi);
    p.u_reset = seeded_uniform_init(rng, hidden_dim, hidden_dim, wh);
    p.b_reset = Tensor::zeros(1, hidden_dim, true);
    p.w_cand = seeded_uniform_init(rng, input_dim, hidden_dim, wi);
    p.u_cand = seeded_uniform_init(rng, hidden_dim, hidden_dim, wh);
    p.b_cand = Tensor::zeros(1, hidden_dim, true);
    return p;
}

void GruParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    out.push_back({prefix + ".w_z", w_update});
    out.push_back({prefix + ".u_z", u_update});
    out.push_back({prefix + ".b_z", b_update});
    out.push_back({prefix + ".w_r", w_reset});
    out.push_back({prefix + ".u_r", u_reset});
    out.push_back({prefix + ".b_r", b_reset});
    out.push_back({prefix + ".w_h", w_cand});
    out.push_back({prefix + ".u_h", u_cand});
    out.push_back({prefix + ".b_h", b_cand});
}

Tensor gru_update(const GruParams& params, const Tensor& prior, const Tensor& input) {
    if (prior.cols() != params.hidden_dim)
        throw ShapeError("gru_update: prior width " + prior.shape_str() +
                         " does not match hidden_dim " + std::to_string(params.hidden_dim));
    if (input.cols() != params.input_dim)
        throw ShapeError("gru_update: input width " + input.shape_str() +
                         " does not match input_dim " + std::to_string(params.input_dim));
    if (input.rows() != prior.rows() && input.rows() != 1)
        throw ShapeError("gru_update: input rows must match prior rows or be 1");

    // A 1-row input acts on every position; matmul keeps it 1 x hidden and
    // the row broadcast in add() spreads it.
    Tensor z = sigmoid(add(add(matmul(input, params.w_update), matmul(prior, params.u_update)),
                           params.b_update));
    Tensor r = sigmoid(add(add(matmul(input, params.w_reset), matmul(prior, params.u_reset)),
                           params.b_reset));
    Tensor cand = tanh_op(add(
        add(matmul(input, params.w_cand), matmul(mul(r, prior), params.u_cand)), params.b_cand));
    Tensor keep = mul(affine(z, -1.0, 1.0), prior); // (1 - z) * prior
    return add(keep, mul(z, cand));
}

} // namespace mglra

#pragma once

#include <vector>

#include "mglra/gradcheck.hpp"
#include "mglra/tensor.hpp"

namespace mglra {

// Multi-head dot-product attention for one ordered modality pair: queries
// from m, keys/values from m'. Unscaled by default; `scaled` opts into the
// 1/sqrt(head_dim) factor.
struct MhaParams {
    std::size_t n_heads = 0;
    std::size_t model_dim = 0; // width of the query/key/value source rows
    std::size_t head_dim = 0;  // d_m; output width is n_heads * head_dim
    bool scaled = false;
    std::vector<Tensor> w_query; // model_dim x head_dim per head
    std::vector<Tensor> w_key;
    std::vector<Tensor> w_value;

    static MhaParams init(std::size_t n_heads, std::size_t model_dim, std::size_t head_dim,
                          bool scaled, RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// head_i = softmax((Q W_q)(K W_k)^T) (V W_v); query T_Q x model_dim,
// key/value T_K x model_dim; output T_Q x head_dim.
Tensor head_attention(const MhaParams& params, const Tensor& query_source,
                      const Tensor& key_value_source, std::size_t head);

// Concatenation of all heads: T_Q x (n_heads * head_dim).
Tensor multi_head(const MhaParams& params, const Tensor& query_source,
                  const Tensor& key_value_source);

// GRU cell applied per row: prior rows are the hidden state, input rows the
// attended features. Output width equals the prior width.
struct GruParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Tensor w_update, u_update, b_update;
    Tensor w_reset, u_reset, b_reset;
    Tensor w_cand, u_cand, b_cand;

    static GruParams init(std::size_t input_dim, std::size_t hidden_dim, RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// prior: L x hidden, input: L x input_dim or 1 x input_dim (broadcast to all
// rows). h' = (1 - z) * prior + z * candidate.
Tensor gru_update(const GruParams& params, const Tensor& prior, const Tensor& input);

} // namespace mglra

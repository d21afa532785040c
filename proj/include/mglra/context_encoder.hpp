#pragma once

#include "mglra/gradcheck.hpp"
#include "mglra/tensor.hpp"

namespace mglra {

enum class Modality : std::size_t { Text = 0, Audio = 1, Vision = 2 };

inline const char* modality_name(Modality m) {
    switch (m) {
        case Modality::Text: return "text";
        case Modality::Audio: return "audio";
        default: return "vision";
    }
}

// Single-layer unidirectional LSTM with zero initial state per sequence.
// Gate order: input, forget, output, candidate.
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Tensor w_input[4];  // input_dim x hidden_dim per gate
    Tensor w_hidden[4]; // hidden_dim x hidden_dim per gate
    Tensor bias[4];     // 1 x hidden_dim per gate

    static LstmParams init(std::size_t input_dim, std::size_t hidden_dim, RngStream& rng);
    static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// sequence: L x input_dim -> L x hidden_dim, hidden state per step.
Tensor encode_context(const LstmParams& params, const Tensor& sequence);

} // namespace mglra

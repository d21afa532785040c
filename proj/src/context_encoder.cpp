#include "mglra/context_encoder.hpp"

namespace mglra {

namespace {
const char* kGateNames[4] = {"i", "f", "o", "g"};
} // namespace

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden_dim, RngStream& rng) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    for (int g = 0; g < 4; ++g) {
        p.w_input[g] =
            seeded_uniform_init(rng, input_dim, hidden_dim, xavier_scale(input_dim, hidden_dim));
        // recurrent weights start small: the encoder begins close to a
        // per-step transform and learns how much context to mix in
        p.w_hidden[g] = seeded_uniform_init(rng, hidden_dim, hidden_dim,
                                            0.05 * xavier_scale(hidden_dim, hidden_dim));
        // forget gate starts mostly closed: early representations stay
        // per-utterance and the encoder learns how much history to keep
        p.bias[g] = g == 1 ? Tensor::from_data(1, hidden_dim,
                                               std::vector<double>(hidden_dim, -2.0), true)
                           : Tensor::zeros(1, hidden_dim, true);
    }
    return p;
}

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    for (int g = 0; g < 4; ++g) {
        p.w_input[g] = Tensor::zeros(input_dim, hidden_dim, true);
        p.w_hidden[g] = Tensor::zeros(hidden_dim, hidden_dim, true);
        p.bias[g] = Tensor::zeros(1, hidden_dim, true);
    }
    return p;
}

void LstmParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    for (int g = 0; g < 4; ++g) {
        out.push_back({prefix + ".w_" + kGateNames[g], w_input[g]});
        out.push_back({prefix + ".u_" + kGateNames[g], w_hidden[g]});
        out.push_back({prefix + ".b_" + kGateNames[g], bias[g]});
    }
}

Tensor encode_context(const LstmParams& params, const Tensor& sequence) {
    if (sequence.cols() != params.input_dim) {
        throw ShapeError("encode_context: sequence width " + std::to_string(sequence.cols()) +
                         " does not match encoder input dim " + std::to_string(params.input_dim));
    }
    const std::size_t steps = sequence.rows();
    Tensor h = Tensor::zeros(1, params.hidden_dim);
    Tensor c = Tensor::zeros(1, params.hidden_dim);
    std::vector<Tensor> outputs;
    outputs.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        Tensor x = slice_rows(sequence, t, 1);
        auto gate = [&](int g) {
            return add(add(matmul(x, params.w_input[g]), matmul(h, params.w_hidden[g])),
                       params.bias[g]);
        };
        Tensor i = sigmoid(gate(0));
        Tensor f = sigmoid(gate(1));
        Tensor o = sigmoid(gate(2));
        Tensor g = tanh_op(gate(3));
        c = add(mul(f, c), mul(i, g));
        h = mul(o, tanh_op(c));
        outputs.push_back(h);
    }
    return concat_rows(outputs);
}

} // namespace mglra

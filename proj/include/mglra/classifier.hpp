#pragma once

#include <vector>

#include "mglra/gradcheck.hpp"
#include "mglra/tensor.hpp"

namespace mglra {

// Two-layer MLP head: relu(x W_l + b_l), then softmax(.. W_smax + b_smax).
struct MlpParams {
    Tensor w_hidden; // in_dim x hidden
    Tensor b_hidden; // 1 x hidden
    Tensor w_out;    // hidden x n_classes
    Tensor b_out;    // 1 x n_classes

    static MlpParams init(std::size_t in_dim, std::size_t hidden, std::size_t n_classes,
                          RngStream& rng);
    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// rows x n_classes probability matrix.
Tensor classify_probs(const MlpParams& params, const Tensor& embeddings);

// Argmax per row; ties resolve to the lowest class index.
std::vector<std::size_t> argmax_rows(const Tensor& probs);

// Mean over rows of -log p[label]; probabilities below 1e-12 are clamped and
// counted as numeric warnings.
Tensor cross_entropy(const Tensor& probs, const std::vector<std::size_t>& labels);

struct Metrics {
    double weighted_accuracy = 0.0;
    double weighted_f1 = 0.0;
    std::vector<double> precision; // per class
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<std::vector<std::size_t>> confusion; // [true][predicted]

    std::size_t total() const;
};

Metrics metrics_from_confusion(const std::vector<std::vector<std::size_t>>& confusion);

std::string metrics_to_json(const Metrics& m);

} // namespace mglra

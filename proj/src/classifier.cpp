#include "mglra/classifier.hpp"

#include <cmath>

#include <json.hpp>

namespace mglra {

MlpParams MlpParams::init(std::size_t in_dim, std::size_t hidden, std::size_t n_classes,
                          RngStream& rng) {
    MlpParams p;
    // fan-in scaling with gain, matching the fusion stack (see MaskedGcnParams)
    p.w_hidden = seeded_uniform_init(rng, in_dim, hidden,
                                     16.0 * std::sqrt(6.0 / static_cast<double>(in_dim)));
    p.b_hidden = Tensor::zeros(1, hidden, true);
    // near-zero head: predictions start uniform and the output layer learns
    // its direction from scratch instead of unlearning a random one
    p.w_out = seeded_uniform_init(rng, hidden, n_classes,
                                  0.02 * xavier_scale(hidden, n_classes));
    p.b_out = Tensor::zeros(1, n_classes, true);
    return p;
}

void MlpParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    out.push_back({prefix + ".w_hidden", w_hidden});
    out.push_back({prefix + ".b_hidden", b_hidden});
    out.push_back({prefix + ".w_out", w_out});
    out.push_back({prefix + ".b_out", b_out});
}

Tensor classify_probs(const MlpParams& params, const Tensor& embeddings) {
    if (embeddings.cols() != params.w_hidden.rows())
        throw ShapeError("classify: embedding width " + embeddings.shape_str() +
                         " does not match classifier input " + params.w_hidden.shape_str());
    Tensor hidden = relu(add(matmul(embeddings, params.w_hidden), params.b_hidden));
    return softmax_rows(add(matmul(hidden, params.w_out), params.b_out));
}

std::vector<std::size_t> argmax_rows(const Tensor& probs) {
    std::vector<std::size_t> out(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.cols(); ++c)
            if (probs.at(r, c) > probs.at(r, best)) best = c;
        out[r] = best;
    }
    return out;
}

Tensor cross_entropy(const Tensor& probs, const std::vector<std::size_t>& labels) {
    if (labels.size() != probs.rows())
        throw ContractError("cross_entropy: need one label per row");
    Tensor picked = gather_per_row(probs, labels);
    Tensor losses = neg_log_clamped(picked);
    return affine(sum_all(losses), 1.0 / static_cast<double>(labels.size()), 0.0);
}

std::size_t Metrics::total() const {
    std::size_t n = 0;
    for (const auto& row : confusion)
        for (std::size_t v : row) n += v;
    return n;
}

Metrics metrics_from_confusion(const std::vector<std::vector<std::size_t>>& confusion) {
    const std::size_t k = confusion.size();
    for (const auto& row : confusion)
        if (row.size() != k) throw ContractError("metrics: confusion matrix must be square");

    Metrics m;
    m.confusion = confusion;
    m.precision.assign(k, 0.0);
    m.recall.assign(k, 0.0);
    m.f1.assign(k, 0.0);

    std::size_t total = 0, correct = 0;
    std::vector<std::size_t> row_sum(k, 0), col_sum(k, 0);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t p = 0; p < k; ++p) {
            row_sum[t] += confusion[t][p];
            col_sum[p] += confusion[t][p];
            total += confusion[t][p];
        }
        correct += confusion[t][t];
    }
    if (total == 0) throw ContractError("metrics: empty confusion matrix");

    for (std::size_t c = 0; c < k; ++c) {
        const double diag = static_cast<double>(confusion[c][c]);
        m.precision[c] = col_sum[c] ? diag / static_cast<double>(col_sum[c]) : 0.0;
        m.recall[c] = row_sum[c] ? diag / static_cast<double>(row_sum[c]) : 0.0;
        m.f1[c] = (m.precision[c] + m.recall[c]) > 0.0
                      ? 2.0 * m.precision[c] * m.recall[c] / (m.precision[c] + m.recall[c])
                      : 0.0;
        m.weighted_f1 += static_cast<double>(row_sum[c]) / static_cast<double>(total) * m.f1[c];
    }
    m.weighted_accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return m;
}

std::string metrics_to_json(const Metrics& m) {
    nlohmann::json j{{"weighted_accuracy", m.weighted_accuracy},
                     {"weighted_f1", m.weighted_f1},
                     {"precision", m.precision},
                     {"recall", m.recall},
                     {"f1", m.f1},
                     {"confusion_matrix", m.confusion}};
    return j.dump(2);
}

} // namespace mglra

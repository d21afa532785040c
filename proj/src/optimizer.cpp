#include "mglra/optimizer.hpp"

#include <cmath>

namespace mglra {

Adam::Adam(AdamConfig config, std::vector<NamedTensor> params)
    : config_(std::move(config)), params_(std::move(params)) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p.tensor.size(), 0.0);
        v_.emplace_back(p.tensor.size(), 0.0);
    }
}

void Adam::step() {
    ++step_;
    const double t = static_cast<double>(step_);
    const double bc1 = 1.0 - std::pow(config_.beta1, t);
    const double bc2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        auto& tensor = params_[pi].tensor;
        auto& values = tensor.mutable_values();
        auto& grad = tensor.impl()->grad;
        auto& m = m_[pi];
        auto& v = v_[pi];
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double g = grad.empty() ? 0.0 : grad[i];
            if (!std::isfinite(g))
                throw NumericError("adam_step: non-finite gradient in " + params_[pi].name);
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            values[i] -= config_.learning_rate *
                         (m_hat / (std::sqrt(v_hat) + config_.eps) +
                          config_.weight_decay * values[i]);
        }
        if (!grad.empty()) tensor.zero_grad();
        tensor.check_finite("adam_step(" + params_[pi].name + ")");
    }
}

} // namespace mglra

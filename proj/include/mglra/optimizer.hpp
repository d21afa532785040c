#pragma once

#include <vector>

#include "mglra/gradcheck.hpp"

namespace mglra {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; // decoupled: applied to weights, not the loss
};

// Adam with bias correction and decoupled weight decay. Parameters with no
// populated gradient are treated as zero-gradient (decay still applies).
class Adam {
public:
    Adam(AdamConfig config, std::vector<NamedTensor> params);

    // Applies one update from the current gradients, then clears them.
    void step();

    std::size_t step_count() const { return step_; }

private:
    AdamConfig config_;
    std::vector<NamedTensor> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::size_t step_ = 0;
};

} // namespace mglra

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mglra/tensor.hpp"

namespace mglra {

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

struct GradCheckReport {
    std::string parameter_name;
    double max_relative_error = 0.0;
    bool pass = false;
};

struct GradCheckOptions {
    double eps = 1e-5;
    double tolerance = 1e-4;
    // Relative error denominator floor; gradients below this magnitude are
    // compared absolutely (scaled), so independent parameters with exact-zero
    // gradients do not divide noise by noise.
    double denominator_floor = 1e-6;
};

// Compares tape gradients of the scalar-valued function f against central
// finite differences, parameter entry by parameter entry. f must rebuild the
// computation from the current parameter values on every call; it is invoked
// once under a fresh tape for the analytic pass and twice per entry (no tape)
// for the differences.
std::vector<GradCheckReport> grad_check(const std::function<Tensor()>& f,
                                        const std::vector<NamedTensor>& params,
                                        const GradCheckOptions& options = {});

} // namespace mglra

#include "mglra/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mglra {

std::vector<GradCheckReport> grad_check(const std::function<Tensor()>& f,
                                        const std::vector<NamedTensor>& params,
                                        const GradCheckOptions& options) {
    if (options.eps <= 0.0) throw ContractError("grad_check: eps must be positive");

    for (const auto& p : params) p.tensor.impl()->grad.clear();

    // Analytic pass.
    Tape tape;
    {
        TapeScope scope(tape);
        Tensor loss = f();
        backward(loss);
    }
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        if (p.tensor.has_grad()) {
            analytic.push_back(p.tensor.grad());
        } else {
            analytic.emplace_back(p.tensor.size(), 0.0);
        }
    }

    // Finite differences, two evaluations per entry, no tape active.
    std::vector<GradCheckReport> reports;
    reports.reserve(params.size());
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& values = const_cast<Tensor&>(params[pi].tensor).mutable_values();
        double worst = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double original = values[i];
            values[i] = original + options.eps;
            const double plus = f().item();
            values[i] = original - options.eps;
            const double minus = f().item();
            values[i] = original;
            const double fd = (plus - minus) / (2.0 * options.eps);
            const double an = analytic[pi][i];
            const double denom =
                std::max({options.denominator_floor, std::fabs(fd), std::fabs(an)});
            worst = std::max(worst, std::fabs(fd - an) / denom);
        }
        reports.push_back(GradCheckReport{params[pi].name, worst, worst <= options.tolerance});
    }
    return reports;
}

} // namespace mglra

#pragma once

#include <cmath>
#include <functional>

#include "ldct/tensor.hpp"

namespace ldct::testing {

// Central finite differences of a scalar function, step h per coordinate.
inline Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                               double h = 1e-4) {
    Tensor g(x.shape());
    Tensor probe = x;
    for (std::int64_t i = 0; i < x.numel(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + h;
        const double fp = f(probe);
        probe[i] = orig - h;
        const double fm = f(probe);
        probe[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Worst-case elementwise relative error between two gradients; small entries
// fall back to an absolute comparison.
inline double max_rel_err(const Tensor& a, const Tensor& b) {
    double worst = 0.0;
    for (std::int64_t i = 0; i < a.numel(); ++i) {
        const double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-2});
        worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
    }
    return worst;
}

} // namespace ldct::testing

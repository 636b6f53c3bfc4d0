#pragma once

// Independent scalar-loop reference computations used to pin expected values.
// These deliberately avoid the library's vectorized/filtered code paths.

#include <cmath>
#include <random>
#include <vector>

#include "ldct/tensor.hpp"

namespace ldct::testing {

inline Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<double> u(lo, hi);
    for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = u(rng);
    return t;
}

// Additive attention gate, one spatial location at a time:
//   q = psi . relu(W_h h + W_l l + b_l) + b_psi,  a = sigmoid(q),  out = a * l
inline Tensor attention_gate_oracle(const Tensor& skip, const Tensor& dec, const Tensor& w_l,
                                    const Tensor& w_h, const Tensor& b_l, const Tensor& psi,
                                    double b_psi) {
    const int C = skip.dim(0), H = skip.dim(1), W = skip.dim(2);
    const int inter = w_l.dim(0);
    Tensor out(skip.shape());
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double q = b_psi;
            for (int m = 0; m < inter; ++m) {
                double pre = b_l[m];
                for (int c = 0; c < C; ++c) {
                    pre += w_h[(static_cast<std::int64_t>(m) * C + c)] * dec.at(c, y, x);
                    pre += w_l[(static_cast<std::int64_t>(m) * C + c)] * skip.at(c, y, x);
                }
                q += psi[m] * (pre > 0.0 ? pre : 0.0);
            }
            const double a = 1.0 / (1.0 + std::exp(-q));
            for (int c = 0; c < C; ++c) out.at(c, y, x) = a * skip.at(c, y, x);
        }
    return out;
}

// Direct Gaussian-window SSIM: every window evaluated with explicit loops.
inline double ssim_window_oracle(const Tensor& a, const Tensor& b, int win, double sigma, double k1,
                                 double k2, double max_value) {
    const int H = a.dim(0), W = a.dim(1);
    std::vector<double> g(static_cast<std::size_t>(win) * win);
    const double c = (win - 1) / 2.0;
    double gsum = 0.0;
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
            const double v =
                std::exp(-((i - c) * (i - c) + (j - c) * (j - c)) / (2.0 * sigma * sigma));
            g[static_cast<std::size_t>(i) * win + j] = v;
            gsum += v;
        }
    for (double& v : g) v /= gsum;

    const double c1 = (k1 * max_value) * (k1 * max_value);
    const double c2 = (k2 * max_value) * (k2 * max_value);
    double acc = 0.0;
    int count = 0;
    for (int y = 0; y + win <= H; ++y)
        for (int x = 0; x + win <= W; ++x) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double wv = g[static_cast<std::size_t>(i) * win + j];
                    const double av = a.at(y + i, x + j), bv = b.at(y + i, x + j);
                    mx += wv * av;
                    my += wv * bv;
                    sxx += wv * av * av;
                    syy += wv * bv * bv;
                    sxy += wv * av * bv;
                }
            const double vx = sxx - mx * mx, vy = syy - my * my, vxy = sxy - mx * my;
            acc += ((2 * mx * my + c1) * (2 * vxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return acc / count;
}

} // namespace ldct::testing

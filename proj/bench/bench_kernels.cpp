// Times the OpenMP kernels against the serial reference implementations on
// layer shapes taken from the default networks.
//
//   ./bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#include <omp.h>

#include "ldct/kernels.hpp"

using namespace ldct;

namespace {

Tensor randn(std::vector<int> shape, std::mt19937_64& rng) {
    Tensor t(std::move(shape));
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = g(rng);
    return t;
}

template <typename F>
double time_best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

struct ConvCase {
    const char* name;
    int C, OC, K, S, P, H, W;
};

void bench_conv(const ConvCase& c, int repeats, std::mt19937_64& rng) {
    const Tensor x = randn({c.C, c.H, c.W}, rng);
    const Tensor w = randn({c.OC, c.C, c.K, c.K}, rng);
    const Tensor b = randn({c.OC}, rng);
    Tensor out;
    const double t_ref =
        time_best_of(repeats, [&] { kern::ref::conv2d_forward(out, x, w, &b, c.S, c.P); });
    const double t_par = time_best_of(repeats, [&] { kern::conv2d_forward(out, x, w, &b, c.S, c.P); });
    const double gflop = 2.0 * out.numel() * c.C * c.K * c.K / 1e9;
    std::printf("%-28s %9.2f ms %9.2f ms %6.2fx %8.2f GF/s\n", c.name, t_ref * 1e3, t_par * 1e3,
                t_ref / t_par, gflop / t_par);
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    std::mt19937_64 rng(1);
    std::printf("threads: %d, best of %d\n", omp_get_max_threads(), repeats);
    std::printf("%-28s %12s %12s %7s %11s\n", "kernel", "serial", "openmp", "speedup", "rate");

    bench_conv({"enc 7x7 s1 c1->c64 @256", 1, 64, 7, 1, 3, 256, 256}, repeats, rng);
    bench_conv({"enc 3x3 s2 c64->c128 @256", 64, 128, 3, 2, 1, 256, 256}, repeats, rng);
    bench_conv({"res 3x3 s1 c256 @64", 256, 256, 3, 1, 1, 64, 64}, repeats, rng);
    bench_conv({"res 3x3 s1 c64 @16", 64, 64, 3, 1, 1, 16, 16}, repeats, rng);
    bench_conv({"disc 4x4 s2 c64->c128 @128", 64, 128, 4, 2, 1, 128, 128}, repeats, rng);

    { // backward kernels on the mid-size residual shape
        const Tensor x = randn({64, 32, 32}, rng);
        const Tensor w = randn({64, 64, 3, 3}, rng);
        Tensor out;
        kern::conv2d_forward(out, x, w, nullptr, 1, 1);
        const Tensor gout = randn(out.shape(), rng);

        Tensor gx(x.shape());
        const double t_gi_ref =
            time_best_of(repeats, [&] { kern::ref::conv2d_backward_input(gx, gout, w, 1, 1); });
        const double t_gi_par =
            time_best_of(repeats, [&] { kern::conv2d_backward_input(gx, gout, w, 1, 1); });
        std::printf("%-28s %9.2f ms %9.2f ms %6.2fx\n", "bwd input 3x3 c64 @32", t_gi_ref * 1e3,
                    t_gi_par * 1e3, t_gi_ref / t_gi_par);

        Tensor gw(w.shape()), gb({64});
        const double t_gw_ref =
            time_best_of(repeats, [&] { kern::ref::conv2d_backward_weight(gw, &gb, gout, x, 1, 1); });
        const double t_gw_par =
            time_best_of(repeats, [&] { kern::conv2d_backward_weight(gw, &gb, gout, x, 1, 1); });
        std::printf("%-28s %9.2f ms %9.2f ms %6.2fx\n", "bwd weight 3x3 c64 @32", t_gw_ref * 1e3,
                    t_gw_par * 1e3, t_gw_ref / t_gw_par);
    }

    { // depth-3 kernels used after inflation
        const Tensor x = randn({32, 3, 64, 64}, rng);
        const Tensor w = randn({32, 32, 3, 3, 3}, rng);
        Tensor out;
        const double t_ref =
            time_best_of(repeats, [&] { kern::ref::conv3d_forward(out, x, w, nullptr, 1, 1); });
        const double t_par =
            time_best_of(repeats, [&] { kern::conv3d_forward(out, x, w, nullptr, 1, 1); });
        std::printf("%-28s %9.2f ms %9.2f ms %6.2fx\n", "conv3d 3x3x3 c32 @64", t_ref * 1e3,
                    t_par * 1e3, t_ref / t_par);
    }

    { // normalization
        const Tensor x = randn({256, 64, 64}, rng);
        const Tensor gamma({256}, 1.0), beta({256}, 0.0);
        Tensor out, mean, inv_std;
        const double t_ref = time_best_of(repeats, [&] {
            kern::ref::group_norm_forward(out, mean, inv_std, x, gamma, beta, 256, 1e-5);
        });
        const double t_par = time_best_of(
            repeats, [&] { kern::group_norm_forward(out, mean, inv_std, x, gamma, beta, 256, 1e-5); });
        std::printf("%-28s %9.2f ms %9.2f ms %6.2fx\n", "instance norm c256 @64", t_ref * 1e3,
                    t_par * 1e3, t_ref / t_par);
    }
    return 0;
}

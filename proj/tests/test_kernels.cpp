#include <doctest.h>

#include <random>

#include "ldct/kernels.hpp"
#include "support/oracles.hpp"

using namespace ldct;
using ldct::testing::random_tensor;

namespace {
double max_abs_diff(const Tensor& a, const Tensor& b) {
    REQUIRE(a.shape() == b.shape());
    double m = 0.0;
    for (std::int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}
} // namespace

TEST_CASE("parallel conv2d matches the serial reference") {
    std::mt19937_64 rng(11);
    struct Case {
        int C, OC, K, S, P, H, W;
    };
    for (const Case& c : {Case{3, 5, 3, 1, 1, 9, 11}, Case{2, 4, 4, 2, 1, 12, 10},
                          Case{1, 2, 7, 1, 3, 16, 16}, Case{4, 1, 1, 1, 0, 8, 8}}) {
        const auto [C, OC, K, S, P, H, W] = c;
        const Tensor x = random_tensor({C, H, W}, rng);
        const Tensor w = random_tensor({OC, C, K, K}, rng);
        const Tensor b = random_tensor({OC}, rng);
        Tensor out_par, out_ref;
        kern::conv2d_forward(out_par, x, w, &b, S, P);
        kern::ref::conv2d_forward(out_ref, x, w, &b, S, P);
        CHECK(max_abs_diff(out_par, out_ref) < 1e-12);

        const Tensor gout = random_tensor(out_par.shape(), rng);
        Tensor gx_par(x.shape()), gx_ref(x.shape());
        kern::conv2d_backward_input(gx_par, gout, w, S, P);
        kern::ref::conv2d_backward_input(gx_ref, gout, w, S, P);
        CHECK(max_abs_diff(gx_par, gx_ref) < 1e-12);

        Tensor gw_par(w.shape()), gw_ref(w.shape()), gb_par({OC}), gb_ref({OC});
        kern::conv2d_backward_weight(gw_par, &gb_par, gout, x, S, P);
        kern::ref::conv2d_backward_weight(gw_ref, &gb_ref, gout, x, S, P);
        CHECK(max_abs_diff(gw_par, gw_ref) < 1e-12);
        CHECK(max_abs_diff(gb_par, gb_ref) < 1e-12);
    }
}

TEST_CASE("parallel conv3d matches the serial reference") {
    std::mt19937_64 rng(12);
    const Tensor x = random_tensor({2, 3, 10, 9}, rng);
    const Tensor w = random_tensor({4, 2, 3, 3, 3}, rng);
    const Tensor b = random_tensor({4}, rng);
    Tensor out_par, out_ref;
    kern::conv3d_forward(out_par, x, w, &b, 2, 1);
    kern::ref::conv3d_forward(out_ref, x, w, &b, 2, 1);
    CHECK(max_abs_diff(out_par, out_ref) < 1e-12);
}

TEST_CASE("parallel group norm matches the serial reference") {
    std::mt19937_64 rng(13);
    const Tensor x = random_tensor({6, 7, 5}, rng);
    const Tensor gamma = random_tensor({6}, rng, 0.5, 1.5);
    const Tensor beta = random_tensor({6}, rng);
    Tensor o1, m1, s1, o2, m2, s2;
    kern::group_norm_forward(o1, m1, s1, x, gamma, beta, 6, 1e-5);
    kern::ref::group_norm_forward(o2, m2, s2, x, gamma, beta, 6, 1e-5);
    CHECK(max_abs_diff(o1, o2) < 1e-12);
    CHECK(max_abs_diff(m1, m2) < 1e-12);
}

TEST_CASE("parallel upsample matches the serial reference") {
    std::mt19937_64 rng(14);
    const Tensor x = random_tensor({3, 6, 5}, rng);
    Tensor o1, o2;
    kern::upsample2x_forward(o1, x);
    kern::ref::upsample2x_forward(o2, x);
    CHECK(max_abs_diff(o1, o2) == 0.0);
}

TEST_CASE("conv kernels reject mismatched channel counts") {
    const Tensor x({2, 8, 8});
    const Tensor w({4, 3, 3, 3});
    Tensor out;
    CHECK_THROWS_AS(kern::conv2d_forward(out, x, w, nullptr, 1, 1), ShapeMismatch);
}

#include <doctest.h>

#include <random>

#include "ldct/autograd.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace ldct;
using ldct::testing::finite_diff_grad;
using ldct::testing::max_rel_err;
using ldct::testing::random_tensor;

namespace {

// Checks d(mean of some graph output)/dx against central differences.
void check_input_grad(const std::function<ag::Var(const ag::Var&)>& build, const Tensor& x0,
                      double tol = 1e-6) {
    auto f = [&](const Tensor& x) { return ag::mean_all(build(ag::parameter(x)))->scalar(); };
    const ag::Var x = ag::parameter(x0);
    const ag::Var loss = ag::mean_all(build(x));
    ag::backward(loss);
    const Tensor fd = finite_diff_grad(f, x0);
    CHECK(max_rel_err(x->grad, fd) < tol);
}

} // namespace

TEST_CASE("conv2d gradients match finite differences") {
    std::mt19937_64 rng(21);
    const Tensor x0 = random_tensor({2, 6, 6}, rng);
    const Tensor w0 = random_tensor({3, 2, 3, 3}, rng);
    const Tensor b0 = random_tensor({3}, rng);

    // input gradient
    {
        const ag::Var w = ag::constant(w0);
        const ag::Var b = ag::constant(b0);
        check_input_grad([&](const ag::Var& x) { return ag::conv2d(x, w, b, 2, 1); }, x0);
    }
    // weight and bias gradients
    {
        const ag::Var x = ag::constant(x0);
        const ag::Var w = ag::parameter(w0);
        const ag::Var b = ag::parameter(b0);
        const ag::Var loss = ag::mean_all(ag::square(ag::conv2d(x, w, b, 1, 1)));
        ag::backward(loss);
        auto fw = [&](const Tensor& wt) {
            return ag::mean_all(ag::square(ag::conv2d(x, ag::constant(wt), b, 1, 1)))->scalar();
        };
        CHECK(max_rel_err(w->grad, finite_diff_grad(fw, w0)) < 1e-6);
        auto fb = [&](const Tensor& bt) {
            return ag::mean_all(ag::square(ag::conv2d(x, w, ag::constant(bt), 1, 1)))->scalar();
        };
        CHECK(max_rel_err(b->grad, finite_diff_grad(fb, b0)) < 1e-6);
    }
}

TEST_CASE("conv3d gradients match finite differences") {
    std::mt19937_64 rng(22);
    const Tensor x0 = random_tensor({1, 3, 5, 5}, rng);
    const Tensor w0 = random_tensor({2, 1, 3, 3, 3}, rng);
    const ag::Var w = ag::parameter(w0);
    check_input_grad([&](const ag::Var& x) { return ag::conv3d(x, w, nullptr, 1, 1); }, x0);

    const ag::Var x = ag::constant(x0);
    const ag::Var loss = ag::mean_all(ag::square(ag::conv3d(x, w, nullptr, 1, 1)));
    w->zero_grad();
    ag::backward(loss);
    auto fw = [&](const Tensor& wt) {
        return ag::mean_all(ag::square(ag::conv3d(x, ag::constant(wt), nullptr, 1, 1)))->scalar();
    };
    CHECK(max_rel_err(w->grad, finite_diff_grad(fw, w0)) < 1e-6);
}

TEST_CASE("group norm gradients match finite differences") {
    std::mt19937_64 rng(23);
    const Tensor x0 = random_tensor({3, 4, 4}, rng);
    const Tensor g0 = random_tensor({3}, rng, 0.5, 1.5);
    const Tensor b0 = random_tensor({3}, rng);
    const ag::Var gamma = ag::parameter(g0);
    const ag::Var beta = ag::parameter(b0);
    check_input_grad([&](const ag::Var& x) { return ag::square(ag::group_norm(x, gamma, beta, 3)); },
                     x0, 1e-5);

    const ag::Var x = ag::constant(x0);
    gamma->zero_grad();
    beta->zero_grad();
    const ag::Var loss = ag::mean_all(ag::square(ag::group_norm(x, gamma, beta, 3)));
    ag::backward(loss);
    auto fg = [&](const Tensor& gt) {
        return ag::mean_all(ag::square(ag::group_norm(x, ag::constant(gt), beta, 3)))->scalar();
    };
    CHECK(max_rel_err(gamma->grad, finite_diff_grad(fg, g0)) < 1e-5);
}

TEST_CASE("pointwise, shaping and gating ops differentiate correctly") {
    std::mt19937_64 rng(24);

    check_input_grad([](const ag::Var& x) { return ag::tanh_op(x); }, random_tensor({2, 3, 3}, rng));
    check_input_grad([](const ag::Var& x) { return ag::sigmoid_op(x); }, random_tensor({2, 3, 3}, rng));
    check_input_grad([](const ag::Var& x) { return ag::leaky_relu(x, 0.2); },
                     random_tensor({2, 3, 3}, rng));
    check_input_grad([](const ag::Var& x) { return ag::softplus(x); }, random_tensor({2, 3, 3}, rng));
    check_input_grad([](const ag::Var& x) { return ag::upsample2x(x); }, random_tensor({2, 3, 3}, rng));
    check_input_grad([](const ag::Var& x) { return ag::center_depth(x); },
                     random_tensor({2, 3, 3, 3}, rng));
    check_input_grad([](const ag::Var& x) { return ag::replicate_depth3(x); },
                     random_tensor({2, 3, 3}, rng));

    const Tensor gate0 = random_tensor({1, 3, 3}, rng, 0.1, 0.9);
    const ag::Var gate = ag::constant(gate0);
    check_input_grad([&](const ag::Var& x) { return ag::gate_mul(gate, x); },
                     random_tensor({4, 3, 3}, rng));

    const ag::Var other = ag::constant(random_tensor({2, 3, 3}, rng));
    check_input_grad([&](const ag::Var& x) { return ag::concat_ch(x, other); },
                     random_tensor({2, 3, 3}, rng));
    check_input_grad([&](const ag::Var& x) { return ag::abs_op(ag::sub(x, other)); },
                     random_tensor({2, 3, 3}, rng));
}

TEST_CASE("gradients accumulate across shared subgraphs") {
    // x used twice: loss = mean(x) + mean(x^2) => grad = 1/n + 2x/n.
    const Tensor x0{{2, 2}, {1.0, -2.0, 3.0, 0.5}};
    const ag::Var x = ag::parameter(x0);
    const ag::Var loss = ag::add(ag::mean_all(x), ag::mean_all(ag::square(x)));
    ag::backward(loss);
    for (std::int64_t i = 0; i < 4; ++i)
        CHECK(x->grad[i] == doctest::Approx(0.25 + 0.5 * x0[i]).epsilon(1e-12));
}

TEST_CASE("backward requires a scalar root") {
    const ag::Var x = ag::parameter(Tensor({2, 2}, 1.0));
    CHECK_THROWS_AS(ag::backward(ag::square(x)), ShapeMismatch);
}

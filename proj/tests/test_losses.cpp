#include <doctest.h>

#include <random>

#include "ldct/losses.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace ldct;
using namespace ldct::loss;
using ldct::testing::finite_diff_grad;
using ldct::testing::max_rel_err;
using ldct::testing::random_tensor;

TEST_CASE("generator adversarial loss endpoints") {
    const ag::Var ones = ag::constant(Tensor({1, 3, 3}, 1.0));
    const ag::Var zeros = ag::constant(Tensor({1, 3, 3}, 0.0));
    CHECK(adversarial_gen_loss(ones, ones)->scalar() == doctest::Approx(0.0));
    CHECK(adversarial_gen_loss(zeros, zeros)->scalar() == doctest::Approx(1.0));
}

TEST_CASE("generator adversarial loss matches a scalar-loop mean") {
    std::mt19937_64 rng(51);
    const Tensor sy = random_tensor({1, 4, 5}, rng, -2, 2);
    const Tensor sx = random_tensor({1, 3, 3}, rng, -2, 2);
    double acc = 0.0;
    for (std::int64_t i = 0; i < sy.numel(); ++i) acc += (sy[i] - 1) * (sy[i] - 1);
    for (std::int64_t i = 0; i < sx.numel(); ++i) acc += (sx[i] - 1) * (sx[i] - 1);
    const double expect = acc / static_cast<double>(sy.numel() + sx.numel());
    CHECK(adversarial_gen_loss(ag::constant(sy), ag::constant(sx))->scalar() ==
          doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("critic loss endpoints and oracle") {
    std::mt19937_64 rng(52);
    const ag::Var ones = ag::constant(Tensor({1, 2, 2}, 1.0));
    const ag::Var zeros = ag::constant(Tensor({1, 2, 2}, 0.0));
    CHECK(adversarial_disc_loss(ones, zeros)->scalar() == doctest::Approx(0.0));
    CHECK(adversarial_disc_loss(zeros, ones)->scalar() == doctest::Approx(1.0));

    const Tensor r = random_tensor({1, 4, 4}, rng, -2, 2);
    const Tensor f = random_tensor({1, 4, 4}, rng, -2, 2);
    double ar = 0.0, af = 0.0;
    for (std::int64_t i = 0; i < r.numel(); ++i) ar += (r[i] - 1) * (r[i] - 1);
    for (std::int64_t i = 0; i < f.numel(); ++i) af += f[i] * f[i];
    const double expect = 0.5 * (ar / r.numel() + af / f.numel());
    CHECK(adversarial_disc_loss(ag::constant(r), ag::constant(f))->scalar() ==
          doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("log-form adversarial losses are positive and saturate correctly") {
    const ag::Var big = ag::constant(Tensor({1, 2, 2}, 20.0));
    const ag::Var small = ag::constant(Tensor({1, 2, 2}, -20.0));
    CHECK(adversarial_gen_loss(big, big, GanLossKind::log_sigmoid)->scalar() ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK(adversarial_gen_loss(small, small, GanLossKind::log_sigmoid)->scalar() ==
          doctest::Approx(20.0).epsilon(1e-3));
    CHECK(adversarial_disc_loss(big, small, GanLossKind::log_sigmoid)->scalar() ==
          doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("cycle loss identity, constant offset, oracle") {
    std::mt19937_64 rng(53);
    const Tensor x = random_tensor({1, 4, 4}, rng);
    const Tensor y = random_tensor({1, 4, 4}, rng);
    CHECK(cycle_loss(ag::constant(x), ag::constant(x), ag::constant(y), ag::constant(y))->scalar() ==
          doctest::Approx(0.0));

    Tensor x_off = x;
    for (std::int64_t i = 0; i < x_off.numel(); ++i) x_off[i] += 0.5;
    CHECK(cycle_loss(ag::constant(x), ag::constant(x_off), ag::constant(y), ag::constant(y))->scalar() ==
          doctest::Approx(0.5).epsilon(1e-12));

    const Tensor rx = random_tensor({1, 4, 4}, rng);
    const Tensor ry = random_tensor({1, 4, 4}, rng);
    double acc = 0.0;
    for (std::int64_t i = 0; i < x.numel(); ++i) acc += std::fabs(rx[i] - x[i]) / x.numel();
    for (std::int64_t i = 0; i < y.numel(); ++i) acc += std::fabs(ry[i] - y[i]) / y.numel();
    CHECK(cycle_loss(ag::constant(x), ag::constant(rx), ag::constant(y), ag::constant(ry))->scalar() ==
          doctest::Approx(acc).epsilon(1e-6));
    CHECK_THROWS_AS(cycle_loss(ag::constant(x), ag::constant(Tensor({1, 2, 2}, 0.0)), ag::constant(y),
                               ag::constant(ry)),
                    ShapeMismatch);
}

TEST_CASE("perceptual loss identity, degenerate extractor, symmetry") {
    std::mt19937_64 rng(54);
    const Tensor a = random_tensor({1, 8, 8}, rng);
    const Tensor b = random_tensor({1, 8, 8}, rng);
    const auto toy = make_extractor("toy3");
    const auto ident = make_extractor("identity");
    const auto cfg = PerceptualConfig::defaults();

    CHECK(perceptual_loss(ag::constant(a), ag::constant(a), cfg, *toy)->scalar() ==
          doctest::Approx(0.0));

    // Identity extractor with omega = [1] reduces to plain MSE.
    PerceptualConfig icfg;
    icfg.layer_set = {"image"};
    icfg.weights_omega = {1.0};
    icfg.extractor_id = "identity";
    double mse = 0.0;
    for (std::int64_t i = 0; i < a.numel(); ++i) mse += (a[i] - b[i]) * (a[i] - b[i]);
    mse /= static_cast<double>(a.numel());
    CHECK(perceptual_loss(ag::constant(a), ag::constant(b), icfg, *ident)->scalar() ==
          doctest::Approx(mse).epsilon(1e-12));

    // Symmetric in (a, b).
    CHECK(perceptual_loss(ag::constant(a), ag::constant(b), cfg, *toy)->scalar() ==
          doctest::Approx(perceptual_loss(ag::constant(b), ag::constant(a), cfg, *toy)->scalar()));
}

TEST_CASE("perceptual loss matches a feature-space scalar oracle") {
    // Oracle: run the extractor on both images, then average squared
    // differences with explicit loops over every tap.
    std::mt19937_64 rng(55);
    const Tensor a = random_tensor({1, 8, 8}, rng);
    const Tensor b = random_tensor({1, 8, 8}, rng);
    const auto toy = make_extractor("toy3");
    PerceptualConfig cfg;
    cfg.layer_set = {"conv1", "conv2", "conv3"};
    cfg.weights_omega = {0.5, 1.0, 2.0};
    const auto fa = toy->features(ag::constant(a), cfg.layer_set);
    const auto fb = toy->features(ag::constant(b), cfg.layer_set);
    double expect = 0.0;
    for (std::size_t l = 0; l < fa.size(); ++l) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < fa[l]->value.numel(); ++i) {
            const double d = fa[l]->value[i] - fb[l]->value[i];
            acc += d * d;
        }
        expect += cfg.weights_omega[l] * acc / static_cast<double>(fa[l]->value.numel());
    }
    CHECK(perceptual_loss(ag::constant(a), ag::constant(b), cfg, *toy)->scalar() ==
          doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("total loss weighted sum and linearity in each weight") {
    const ag::Var adv = ag::constant(Tensor({1}, 0.5));
    const ag::Var cyc = ag::constant(Tensor({1}, 0.2));
    const ag::Var perc = ag::constant(Tensor({1}, 0.3));
    CHECK(total_loss(adv, cyc, perc, {1.0, 10.0, 1.0})->scalar() == doctest::Approx(2.8));
    CHECK(total_loss(adv, cyc, perc, {0.0, 0.0, 0.0})->scalar() == doctest::Approx(0.0));
    // lambda_perc = 0 recovers the two-term objective.
    CHECK(total_loss(adv, cyc, perc, {1.0, 10.0, 0.0})->scalar() ==
          doctest::Approx(0.5 + 2.0));
    // linearity: L(2*lambda_cyc) - L(lambda_cyc) == lambda_cyc * cyc
    const double l1 = total_loss(adv, cyc, perc, {1.0, 10.0, 1.0})->scalar();
    const double l2 = total_loss(adv, cyc, perc, {1.0, 20.0, 1.0})->scalar();
    CHECK(l2 - l1 == doctest::Approx(10.0 * 0.2));
    CHECK_THROWS_AS(total_loss(adv, cyc, perc, {-1.0, 0.0, 0.0}), ConfigError);
}

TEST_CASE("every loss gradient matches central finite differences") {
    std::mt19937_64 rng(56);
    const auto toy = make_extractor("toy3");
    const auto pcfg = PerceptualConfig::defaults();

    // adversarial generator loss wrt scores
    {
        const Tensor s0 = random_tensor({1, 4, 4}, rng);
        const Tensor sx = random_tensor({1, 4, 4}, rng);
        const ag::Var sxv = ag::constant(sx);
        const ag::Var s = ag::parameter(s0);
        const ag::Var l = adversarial_gen_loss(s, sxv);
        ag::backward(l);
        auto f = [&](const Tensor& t) {
            return adversarial_gen_loss(ag::constant(t), sxv)->scalar();
        };
        CHECK(max_rel_err(s->grad, finite_diff_grad(f, s0)) < 1e-4);
    }
    // critic loss wrt fake scores
    {
        const Tensor r = random_tensor({1, 4, 4}, rng);
        const Tensor f0 = random_tensor({1, 4, 4}, rng);
        const ag::Var rv = ag::constant(r);
        const ag::Var fv = ag::parameter(f0);
        ag::backward(adversarial_disc_loss(rv, fv));
        auto f = [&](const Tensor& t) { return adversarial_disc_loss(rv, ag::constant(t))->scalar(); };
        CHECK(max_rel_err(fv->grad, finite_diff_grad(f, f0)) < 1e-4);
    }
    // cycle loss wrt a reconstruction
    {
        const Tensor x = random_tensor({1, 4, 4}, rng);
        const Tensor rx0 = random_tensor({1, 4, 4}, rng);
        const Tensor y = random_tensor({1, 4, 4}, rng);
        const Tensor ry = random_tensor({1, 4, 4}, rng);
        const ag::Var rx = ag::parameter(rx0);
        ag::backward(cycle_loss(ag::constant(x), rx, ag::constant(y), ag::constant(ry)));
        auto f = [&](const Tensor& t) {
            return cycle_loss(ag::constant(x), ag::constant(t), ag::constant(y), ag::constant(ry))
                ->scalar();
        };
        CHECK(max_rel_err(rx->grad, finite_diff_grad(f, rx0)) < 1e-4);
    }
    // perceptual loss wrt one input, through the frozen extractor
    {
        const Tensor a0 = random_tensor({1, 4, 4}, rng);
        const Tensor b = random_tensor({1, 4, 4}, rng);
        const ag::Var a = ag::parameter(a0);
        ag::backward(perceptual_loss(a, ag::constant(b), pcfg, *toy));
        auto f = [&](const Tensor& t) {
            return perceptual_loss(ag::constant(t), ag::constant(b), pcfg, *toy)->scalar();
        };
        CHECK(max_rel_err(a->grad, finite_diff_grad(f, a0)) < 1e-4);
    }
    // total loss composed end to end wrt the fake scores
    {
        const LossWeights w{1.0, 10.0, 1.0};
        const Tensor s0 = random_tensor({1, 4, 4}, rng);
        const Tensor x = random_tensor({1, 4, 4}, rng);
        const Tensor rx = random_tensor({1, 4, 4}, rng);
        const ag::Var s = ag::parameter(s0);
        const ag::Var l = total_loss(
            adversarial_gen_loss(s, ag::constant(s0)),
            cycle_loss(ag::constant(x), ag::constant(rx), ag::constant(x), ag::constant(rx)),
            perceptual_loss(ag::constant(x), ag::constant(rx), pcfg, *toy), w);
        ag::backward(l);
        auto f = [&](const Tensor& t) {
            return total_loss(
                       adversarial_gen_loss(ag::constant(t), ag::constant(s0)),
                       cycle_loss(ag::constant(x), ag::constant(rx), ag::constant(x), ag::constant(rx)),
                       perceptual_loss(ag::constant(x), ag::constant(rx), pcfg, *toy), w)
                ->scalar();
        };
        CHECK(max_rel_err(s->grad, finite_diff_grad(f, s0)) < 1e-4);
    }
}

TEST_CASE("extractor weights are frozen and deterministic") {
    const auto e1 = make_extractor("toy3");
    const auto e2 = make_extractor("toy3");
    const auto w1 = e1->weights();
    const auto w2 = e2->weights();
    REQUIRE(w1.size() == w2.size());
    for (std::size_t i = 0; i < w1.size(); ++i)
        for (std::int64_t k = 0; k < w1[i].second.numel(); ++k)
            CHECK(w1[i].second[k] == w2[i].second[k]);

    // Gradients flow to the image but never into the extractor weights.
    std::mt19937_64 rng(57);
    const Tensor a0 = random_tensor({1, 4, 4}, rng);
    const ag::Var a = ag::parameter(a0);
    ag::backward(perceptual_loss(a, ag::constant(random_tensor({1, 4, 4}, rng)),
                                 PerceptualConfig::defaults(), *e1));
    CHECK(a->grad_ready);
    const auto w_after = e1->weights();
    for (std::size_t i = 0; i < w1.size(); ++i)
        for (std::int64_t k = 0; k < w1[i].second.numel(); ++k)
            CHECK(w_after[i].second[k] == w1[i].second[k]);
}

TEST_CASE("losses are nonnegative on random inputs") {
    std::mt19937_64 rng(58);
    const auto toy = make_extractor("toy3");
    for (int t = 0; t < 10; ++t) {
        const Tensor a = random_tensor({1, 5, 5}, rng, -3, 3);
        const Tensor b = random_tensor({1, 5, 5}, rng, -3, 3);
        CHECK(adversarial_gen_loss(ag::constant(a), ag::constant(b))->scalar() >= 0.0);
        CHECK(adversarial_disc_loss(ag::constant(a), ag::constant(b))->scalar() >= 0.0);
        CHECK(cycle_loss(ag::constant(a), ag::constant(b), ag::constant(a), ag::constant(b))->scalar() >=
              0.0);
        CHECK(perceptual_loss(ag::constant(a), ag::constant(b), PerceptualConfig::defaults(), *toy)
                  ->scalar() >= 0.0);
    }
}

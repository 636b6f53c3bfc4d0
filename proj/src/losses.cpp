#include "ldct/losses.hpp"

#include <random>

namespace ldct::loss {

namespace {

using ag::Var;

// Joint mean over two maps with possibly different sizes.
Var joint_mean(const Var& a, const Var& b) {
    const double na = static_cast<double>(a->value.numel());
    const double nb = static_cast<double>(b->value.numel());
    const Var ma = ag::mean_all(a);
    const Var mb = ag::mean_all(b);
    return ag::scale(ag::add(ag::scale(ma, na), ag::scale(mb, nb)), 1.0 / (na + nb));
}

Var per_score_gen(const Var& s, GanLossKind kind) {
    if (kind == GanLossKind::least_squares) return ag::square(ag::add_scalar(s, -1.0));
    return ag::softplus(ag::scale(s, -1.0)); // -log sigmoid(s)
}

} // namespace

PerceptualConfig PerceptualConfig::defaults() {
    PerceptualConfig c;
    c.layer_set = {"conv3"};
    c.weights_omega = {1.0};
    c.extractor_id = "toy3";
    return c;
}

void PerceptualConfig::validate() const {
    if (layer_set.size() != weights_omega.size())
        throw ConfigError("PerceptualConfig: layer_set and weights_omega lengths differ");
    for (double w : weights_omega)
        if (w < 0) throw ConfigError("PerceptualConfig: weights must be >= 0");
}

namespace {

class IdentityExtractor final : public FeatureExtractor {
  public:
    std::vector<ag::Var> features(const ag::Var& image, const std::vector<std::string>& taps) const override {
        return std::vector<ag::Var>(taps.size(), image);
    }
    std::vector<std::pair<std::string, Tensor>> weights() const override { return {}; }
    std::string id() const override { return "identity"; }
};

class ToyConvExtractor final : public FeatureExtractor {
  public:
    explicit ToyConvExtractor(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 0.25);
        auto normal = [&](std::vector<int> shape) {
            Tensor t(std::move(shape));
            for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = gauss(rng);
            return t;
        };
        w1_ = ag::constant(normal({8, 1, 3, 3}));
        w2_ = ag::constant(normal({16, 8, 3, 3}));
        w3_ = ag::constant(normal({16, 16, 3, 3}));
    }

    std::vector<ag::Var> features(const ag::Var& image, const std::vector<std::string>& taps) const override {
        if (image->value.ndim() != 3 || image->value.dim(0) != 1)
            throw ShapeMismatch("toy extractor: expected {1,H,W} input");
        const ag::Var f1 = ag::leaky_relu(ag::conv2d(image, w1_, nullptr, 1, 1), 0.2);
        const ag::Var f2 = ag::leaky_relu(ag::conv2d(f1, w2_, nullptr, 2, 1), 0.2);
        const ag::Var f3 = ag::conv2d(f2, w3_, nullptr, 1, 1);
        std::vector<ag::Var> out;
        out.reserve(taps.size());
        for (const auto& t : taps) {
            if (t == "conv1") out.push_back(f1);
            else if (t == "conv2") out.push_back(f2);
            else if (t == "conv3") out.push_back(f3);
            else throw ConfigError("toy extractor: unknown tap " + t);
        }
        return out;
    }

    std::vector<std::pair<std::string, Tensor>> weights() const override {
        return {{"conv1", w1_->value}, {"conv2", w2_->value}, {"conv3", w3_->value}};
    }
    std::string id() const override { return "toy3"; }

  private:
    ag::Var w1_, w2_, w3_;
};

} // namespace

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& id, std::uint64_t seed) {
    if (id == "identity") return std::make_unique<IdentityExtractor>();
    if (id == "toy3") return std::make_unique<ToyConvExtractor>(seed);
    throw ConfigError("unknown feature extractor: " + id);
}

ag::Var adversarial_gen_loss(const ag::Var& scores_fake_y, const ag::Var& scores_fake_x,
                             GanLossKind kind) {
    return joint_mean(per_score_gen(scores_fake_y, kind), per_score_gen(scores_fake_x, kind));
}

ag::Var adversarial_disc_loss(const ag::Var& scores_real, const ag::Var& scores_fake,
                              GanLossKind kind) {
    Var real_term, fake_term;
    if (kind == GanLossKind::least_squares) {
        real_term = ag::mean_all(ag::square(ag::add_scalar(scores_real, -1.0)));
        fake_term = ag::mean_all(ag::square(scores_fake));
    } else {
        real_term = ag::mean_all(ag::softplus(ag::scale(scores_real, -1.0)));
        fake_term = ag::mean_all(ag::softplus(scores_fake));
    }
    return ag::scale(ag::add(real_term, fake_term), 0.5);
}

ag::Var cycle_loss(const ag::Var& x, const ag::Var& f_of_g_x, const ag::Var& y,
                   const ag::Var& g_of_f_y) {
    if (!x->value.same_shape(f_of_g_x->value) || !y->value.same_shape(g_of_f_y->value))
        throw ShapeMismatch("cycle_loss: reconstruction shape mismatch");
    const Var lx = ag::mean_all(ag::abs_op(ag::sub(f_of_g_x, x)));
    const Var ly = ag::mean_all(ag::abs_op(ag::sub(g_of_f_y, y)));
    return ag::add(lx, ly);
}

ag::Var perceptual_loss(const ag::Var& a, const ag::Var& b, const PerceptualConfig& config,
                        const FeatureExtractor& extractor) {
    config.validate();
    if (!a->value.same_shape(b->value)) throw ShapeMismatch("perceptual_loss: inputs differ in shape");
    const auto fa = extractor.features(a, config.layer_set);
    const auto fb = extractor.features(b, config.layer_set);
    Var acc;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const Var term =
            ag::scale(ag::mean_all(ag::square(ag::sub(fa[i], fb[i]))), config.weights_omega[i]);
        acc = acc ? ag::add(acc, term) : term;
    }
    if (!acc) {
        Tensor zero({1});
        acc = ag::constant(zero);
    }
    return acc;
}

ag::Var total_loss(const ag::Var& adv, const ag::Var& cyc, const ag::Var& perc,
                   const LossWeights& weights) {
    weights.validate();
    return ag::add(ag::add(ag::scale(adv, weights.lambda_adv), ag::scale(cyc, weights.lambda_cyc)),
                   ag::scale(perc, weights.lambda_perc));
}

} // namespace ldct::loss

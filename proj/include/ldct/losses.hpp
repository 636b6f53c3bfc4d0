#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ldct/autograd.hpp"

namespace ldct::loss {

struct LossWeights {
    double lambda_adv = 1.0;
    double lambda_cyc = 10.0;
    double lambda_perc = 1.0;

    void validate() const {
        if (lambda_adv < 0 || lambda_cyc < 0 || lambda_perc < 0)
            throw ConfigError("LossWeights: weights must be >= 0");
    }
};

// Choice of the per-score criterion in the adversarial terms.
enum class GanLossKind { least_squares, log_sigmoid };

struct PerceptualConfig {
    std::vector<std::string> layer_set;
    std::vector<double> weights_omega;
    std::string extractor_id = "toy3";

    static PerceptualConfig defaults();
    void validate() const;
};

// Frozen feature pyramid: maps an image to feature maps at named taps.
// Gradients flow to the input; the extractor's own weights never update.
class FeatureExtractor {
  public:
    virtual ~FeatureExtractor() = default;
    virtual std::vector<ag::Var> features(const ag::Var& image,
                                          const std::vector<std::string>& taps) const = 0;
    virtual std::vector<std::pair<std::string, Tensor>> weights() const = 0;
    virtual std::string id() const = 0;
};

// "identity": single tap returning the image itself (degenerate extractor).
// "toy3": fixed seeded 3-layer conv net with taps conv1/conv2/conv3; lets the
// whole suite run without external pretrained weights. A pretrained network
// can be plugged in behind the same interface.
std::unique_ptr<FeatureExtractor> make_extractor(const std::string& id,
                                                 std::uint64_t seed = 0x7eedf00d);

// Least-squares form: joint mean over both patch maps of (score - 1)^2.
ag::Var adversarial_gen_loss(const ag::Var& scores_fake_y, const ag::Var& scores_fake_x,
                             GanLossKind kind = GanLossKind::least_squares);
// Critic objective: (mean (real-1)^2 + mean fake^2) / 2 in the LS form.
ag::Var adversarial_disc_loss(const ag::Var& scores_real, const ag::Var& scores_fake,
                              GanLossKind kind = GanLossKind::least_squares);
// mean |F(G(x)) - x| + mean |G(F(y)) - y|.
ag::Var cycle_loss(const ag::Var& x, const ag::Var& f_of_g_x, const ag::Var& y,
                   const ag::Var& g_of_f_y);
// sum_l omega_l * mean squared feature difference at tap l.
ag::Var perceptual_loss(const ag::Var& a, const ag::Var& b, const PerceptualConfig& config,
                        const FeatureExtractor& extractor);
// lambda_adv * adv + lambda_cyc * cyc + lambda_perc * perc.
ag::Var total_loss(const ag::Var& adv, const ag::Var& cyc, const ag::Var& perc,
                   const LossWeights& weights);

} // namespace ldct::loss

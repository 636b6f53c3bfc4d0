#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ldct/ctio.hpp"
#include "ldct/losses.hpp"
#include "ldct/model.hpp"

namespace ldct::train {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 1;
    double learning_rate = 2e-4;
    int lr_decay_start_epoch = 20; // 1-based; >= epochs means no decay
    loss::LossWeights loss_weights;
    loss::PerceptualConfig perceptual = loss::PerceptualConfig::defaults();
    std::uint64_t seed = 0;
    int patch_size = 128;
    int checkpoint_every = 5;
    int image_pool_size = 50;
    loss::GanLossKind gan_loss = loss::GanLossKind::least_squares;
    // Apply the perceptual term between input and translation on top of the
    // input / cycle-reconstruction pairing.
    bool perceptual_on_translation = false;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;

    void validate() const;
    // Constant until the decay start, then linear to 0 at the final epoch.
    double lr_at_epoch(int epoch_1based) const;
};

struct StepLosses {
    double adv = 0.0;
    double cyc = 0.0;
    double perc = 0.0;
    double total = 0.0;
    double d_x = 0.0;
    double d_y = 0.0;
};

struct StepRecord {
    long step = 0;
    int epoch = 0;
    double lr = 0.0;
    StepLosses losses;
};

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    StepLosses mean_losses;
    std::optional<double> val_psnr;
    std::optional<double> val_ssim;
};

struct TrainLog {
    std::vector<StepRecord> steps;
    std::vector<EpochRecord> epochs;
};

// Training items, already windowed, normalized to [-1,1], shaped {1,H,W}
// (2D) or {1,3,H,W} (slab).
using PreparedDomain = std::vector<Tensor>;

struct ValidationPair {
    Tensor input_model;    // {1,H,W} or {1,3,H,W}
    Tensor target_display; // {H,W} display units
};

// Windowed + normalized views of a slice dataset; slab mode stacks 3
// neighbours with edge replication.
PreparedDomain prepare_domain(const ctio::DomainDataset& dataset, const ctio::WindowSpec& window,
                              bool slab_mode);

class Adam {
  public:
    Adam() = default;
    Adam(std::vector<ag::Var> params, double beta1, double beta2, double eps = 1e-8);
    void step(double lr);
    void reset_moments();
    long step_count() const { return t_; }

    const std::vector<ag::Var>& params() const { return params_; }
    const std::vector<Tensor>& m() const { return m_; }
    const std::vector<Tensor>& v() const { return v_; }
    void restore(std::vector<Tensor> m, std::vector<Tensor> v, long t);

  private:
    std::vector<ag::Var> params_;
    std::vector<Tensor> m_, v_;
    long t_ = 0;
    double beta1_ = 0.5, beta2_ = 0.999, eps_ = 1e-8;
};

// History buffer of generated samples for the critic updates; size 0 passes
// samples straight through.
class ImagePool {
  public:
    explicit ImagePool(int capacity) : capacity_(capacity) {}
    Tensor query(Tensor fake, std::mt19937_64& rng);
    const std::vector<Tensor>& items() const { return items_; }
    void restore(std::vector<Tensor> items) { items_ = std::move(items); }
    int capacity() const { return capacity_; }

  private:
    int capacity_;
    std::vector<Tensor> items_;
};

class Trainer {
  public:
    Trainer(model::GeneratorSpec gen_spec, model::DiscriminatorSpec disc_spec, TrainConfig config);

    // Single alternating step: one joint G/F update, then D_X, then D_Y.
    StepLosses train_step(const std::vector<Tensor>& x_batch, const std::vector<Tensor>& y_batch);

    TrainLog train(const PreparedDomain& domain_x, const PreparedDomain& domain_y,
                   const std::vector<ValidationPair>* validation = nullptr,
                   const std::string& out_dir = "");

    void save_checkpoint(const std::string& dir) const;
    // fresh_optimizer drops moments/progress (fine-tuning); otherwise the
    // full state resumes bit-compatibly.
    static Trainer load_checkpoint(const std::string& dir, const TrainConfig& config,
                                   bool fresh_optimizer);
    // Generators inflated to depth-3 kernels, discriminators kept as-is.
    static Trainer migrate_to_2p5d(const std::string& checkpoint_dir, const TrainConfig& config);

    // Drops the critics back to fresh seeded weights (optional when task
    // migrating; the default keeps the trained critics).
    void reinitialize_discriminators();

    model::Generator& generator() { return g_; }
    model::Generator& generator_reverse() { return f_; }
    model::Discriminator& disc_x() { return d_x_; }
    model::Discriminator& disc_y() { return d_y_; }
    const TrainConfig& config() const { return config_; }
    int epoch() const { return epoch_; }
    long step() const { return step_; }
    const std::string& architecture_hash() const { return spec_hash_; }

    // Observer for the update ordering ("gen", "d_x", "d_y" per step).
    std::function<void(const std::string&)> on_update;

  private:
    Trainer(model::GeneratorSpec gen_spec, model::DiscriminatorSpec disc_spec, TrainConfig config,
            bool defer_init);
    void init_optimizers();
    static void check_normalized(const std::vector<Tensor>& batch);

    TrainConfig config_;
    model::GeneratorSpec gen_spec_;
    model::DiscriminatorSpec disc_spec_;
    model::Generator g_, f_;
    model::Discriminator d_x_, d_y_;
    Adam opt_gen_, opt_dx_, opt_dy_;
    ImagePool pool_x_, pool_y_;
    std::mt19937_64 sampler_rng_, pool_rng_;
    int epoch_ = 0;
    long step_ = 0;
    double current_lr_ = 0.0;
    std::string spec_hash_;
};

// Reads only the manifest; used for spec-hash verification.
std::string checkpoint_spec_hash(const std::string& dir);
model::GeneratorSpec checkpoint_generator_spec(const std::string& dir);
model::DiscriminatorSpec checkpoint_discriminator_spec(const std::string& dir);
TrainConfig checkpoint_train_config(const std::string& dir);
model::ModelParams load_generator_params(const std::string& dir, const std::string& which);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

} // namespace ldct::train

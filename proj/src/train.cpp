#include "ldct/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ldct/metrics.hpp"

namespace ldct::train {

namespace fs = std::filesystem;
using ag::Var;

void TrainConfig::validate() const {
    if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (learning_rate < 0) throw ConfigError("TrainConfig: learning_rate must be >= 0");
    if (patch_size < 1) throw ConfigError("TrainConfig: patch_size must be >= 1");
    if (image_pool_size < 0) throw ConfigError("TrainConfig: image_pool_size must be >= 0");
    if (checkpoint_every < 0) throw ConfigError("TrainConfig: checkpoint_every must be >= 0");
    loss_weights.validate();
    perceptual.validate();
}

double TrainConfig::lr_at_epoch(int epoch_1based) const {
    if (lr_decay_start_epoch >= epochs || epoch_1based <= lr_decay_start_epoch)
        return learning_rate;
    return learning_rate * static_cast<double>(epochs - epoch_1based) /
           static_cast<double>(epochs - lr_decay_start_epoch);
}

PreparedDomain prepare_domain(const ctio::DomainDataset& dataset, const ctio::WindowSpec& window,
                              bool slab_mode) {
    PreparedDomain out;
    out.reserve(dataset.size());
    const auto& slices = dataset.slices();
    auto to_model = [&](const Tensor& hu) {
        return ctio::normalize_for_model(ctio::apply_window(hu, window), window.y_min, window.y_max);
    };
    for (std::size_t i = 0; i < slices.size(); ++i) {
        if (!slab_mode) {
            const Tensor m = to_model(slices[i].pixels);
            out.push_back(Tensor({1, m.dim(0), m.dim(1)}, m.vec()));
        } else {
            const ctio::Slab3 slab = ctio::stack_neighbors(slices, static_cast<int>(i));
            const Tensor a = to_model(slab.above.pixels);
            const Tensor c = to_model(slab.center.pixels);
            const Tensor b = to_model(slab.below.pixels);
            Tensor t({1, 3, a.dim(0), a.dim(1)});
            const std::int64_t plane = a.numel();
            for (std::int64_t k = 0; k < plane; ++k) {
                t[k] = a[k];
                t[plane + k] = c[k];
                t[2 * plane + k] = b[k];
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(std::vector<ag::Var> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p->value.shape());
        v_.emplace_back(p->value.shape());
    }
}

void Adam::step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        if (!p->grad_ready) continue;
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (std::int64_t k = 0; k < p->value.numel(); ++k) {
            const double g = p->grad[k];
            m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
            v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
            p->value[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps_);
        }
    }
}

void Adam::reset_moments() {
    for (auto& t : m_) t.fill(0.0);
    for (auto& t : v_) t.fill(0.0);
    t_ = 0;
}

void Adam::restore(std::vector<Tensor> m, std::vector<Tensor> v, long t) {
    if (m.size() != params_.size() || v.size() != params_.size())
        throw DimMismatch("Adam: moment count mismatch");
    m_ = std::move(m);
    v_ = std::move(v);
    t_ = t;
}

// ---------------------------------------------------------------------------
// ImagePool

Tensor ImagePool::query(Tensor fake, std::mt19937_64& rng) {
    if (capacity_ == 0) return fake;
    if (static_cast<int>(items_.size()) < capacity_) {
        items_.push_back(fake);
        return fake;
    }
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < 0.5) {
        const std::size_t idx = static_cast<std::size_t>(rng() % items_.size());
        Tensor old = items_[idx];
        items_[idx] = std::move(fake);
        return old;
    }
    return fake;
}

// ---------------------------------------------------------------------------
// Trainer

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Tensor center_slice_of(const Tensor& t) {
    if (t.ndim() == 3) return t;
    const int H = t.dim(2), W = t.dim(3);
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    Tensor out({1, H, W});
    for (std::int64_t i = 0; i < plane; ++i) out[i] = t[plane + i];
    return out;
}

Tensor crop_model_tensor(const Tensor& t, int patch, std::mt19937_64& rng) {
    const int H = t.dim(t.ndim() - 2), W = t.dim(t.ndim() - 1);
    if (patch >= H && patch >= W) return t;
    if (patch > H || patch > W) throw ShapeMismatch("crop: patch exceeds image");
    std::uniform_int_distribution<int> dy(0, H - patch), dx(0, W - patch);
    const int y0 = dy(rng), x0 = dx(rng);
    std::vector<int> oshape = t.shape();
    oshape[static_cast<std::size_t>(t.ndim() - 2)] = patch;
    oshape[static_cast<std::size_t>(t.ndim() - 1)] = patch;
    Tensor out(oshape);
    const std::int64_t planes = t.numel() / (static_cast<std::int64_t>(H) * W);
    for (std::int64_t p = 0; p < planes; ++p)
        for (int y = 0; y < patch; ++y)
            for (int x = 0; x < patch; ++x)
                out[(p * patch + y) * patch + x] =
                    t[(p * static_cast<std::int64_t>(H) + y0 + y) * W + x0 + x];
    return out;
}

std::string rng_to_string(const std::mt19937_64& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

void rng_from_string(std::mt19937_64& rng, const std::string& s) {
    std::istringstream is(s);
    is >> rng;
    if (is.fail()) throw DataError("checkpoint: bad RNG state string");
}

} // namespace

Trainer::Trainer(model::GeneratorSpec gen_spec, model::DiscriminatorSpec disc_spec,
                 TrainConfig config)
    : config_(std::move(config)),
      gen_spec_(std::move(gen_spec)),
      disc_spec_(std::move(disc_spec)),
      g_(gen_spec_, mix_seed(config_.seed, 1)),
      f_(gen_spec_, mix_seed(config_.seed, 2)),
      d_x_(disc_spec_, mix_seed(config_.seed, 3)),
      d_y_(disc_spec_, mix_seed(config_.seed, 4)),
      pool_x_(config_.image_pool_size),
      pool_y_(config_.image_pool_size),
      sampler_rng_(mix_seed(config_.seed, 5)),
      pool_rng_(mix_seed(config_.seed, 6)) {
    config_.validate();
    current_lr_ = config_.learning_rate;
    spec_hash_ = model::spec_hash(gen_spec_, disc_spec_);
    init_optimizers();
}

void Trainer::init_optimizers() {
    std::vector<Var> gen_params = g_.parameters();
    gen_params.insert(gen_params.end(), f_.parameters().begin(), f_.parameters().end());
    opt_gen_ = Adam(std::move(gen_params), config_.adam_beta1, config_.adam_beta2);
    opt_dx_ = Adam(d_x_.parameters(), config_.adam_beta1, config_.adam_beta2);
    opt_dy_ = Adam(d_y_.parameters(), config_.adam_beta1, config_.adam_beta2);
}

void Trainer::check_normalized(const std::vector<Tensor>& batch) {
    for (const auto& t : batch)
        for (std::int64_t i = 0; i < t.numel(); ++i) {
            const double v = t[i];
            if (!(v >= -1.0 - 1e-6 && v <= 1.0 + 1e-6))
                throw DataError("train_step: batch values must be normalized to [-1, 1]");
        }
}

StepLosses Trainer::train_step(const std::vector<Tensor>& x_batch, const std::vector<Tensor>& y_batch) {
    if (x_batch.empty() || y_batch.empty()) throw EmptyDataset("train_step: empty batch");
    check_normalized(x_batch);
    check_normalized(y_batch);
    const bool is3d = gen_spec_.input_slices == 3;
    const double inv_b = 1.0 / static_cast<double>(x_batch.size());
    const auto extractor = loss::make_extractor(config_.perceptual.extractor_id);

    // Generator phase: G and F jointly minimize the composite objective.
    g_.zero_grad();
    f_.zero_grad();
    d_x_.zero_grad();
    d_y_.zero_grad();

    std::vector<Tensor> fakes_x, fakes_y, targets_x, targets_y;
    Var adv_sum, cyc_sum, perc_sum;
    for (std::size_t i = 0; i < x_batch.size(); ++i) {
        const Var x = ag::constant(x_batch[i]);
        const Var y = ag::constant(y_batch[i]);
        const Tensor x_t = center_slice_of(x_batch[i]);
        const Tensor y_t = center_slice_of(y_batch[i]);

        const Var fake_y = g_.forward(x);
        const Var rec_x = f_.forward(is3d ? ag::replicate_depth3(fake_y) : fake_y);
        const Var fake_x = f_.forward(y);
        const Var rec_y = g_.forward(is3d ? ag::replicate_depth3(fake_x) : fake_x);

        const Var s_fake_y = d_y_.forward_train(fake_y);
        const Var s_fake_x = d_x_.forward_train(fake_x);

        const Var xt = ag::constant(x_t);
        const Var yt = ag::constant(y_t);
        const Var adv = loss::adversarial_gen_loss(s_fake_y, s_fake_x, config_.gan_loss);
        const Var cyc = loss::cycle_loss(xt, rec_x, yt, rec_y);
        Var perc = ag::add(loss::perceptual_loss(xt, rec_x, config_.perceptual, *extractor),
                           loss::perceptual_loss(yt, rec_y, config_.perceptual, *extractor));
        if (config_.perceptual_on_translation)
            perc = ag::add(perc,
                           ag::add(loss::perceptual_loss(xt, fake_y, config_.perceptual, *extractor),
                                   loss::perceptual_loss(yt, fake_x, config_.perceptual, *extractor)));

        adv_sum = adv_sum ? ag::add(adv_sum, adv) : adv;
        cyc_sum = cyc_sum ? ag::add(cyc_sum, cyc) : cyc;
        perc_sum = perc_sum ? ag::add(perc_sum, perc) : perc;

        fakes_y.push_back(fake_y->value);
        fakes_x.push_back(fake_x->value);
        targets_x.push_back(x_t);
        targets_y.push_back(y_t);
    }
    const Var adv = ag::scale(adv_sum, inv_b);
    const Var cyc = ag::scale(cyc_sum, inv_b);
    const Var perc = ag::scale(perc_sum, inv_b);
    const Var total = loss::total_loss(adv, cyc, perc, config_.loss_weights);

    StepLosses out;
    out.adv = adv->scalar();
    out.cyc = cyc->scalar();
    out.perc = perc->scalar();
    out.total = total->scalar();
    if (!std::isfinite(out.total))
        throw NonFiniteLoss("train_step: non-finite generator loss (adv=" + std::to_string(out.adv) +
                            " cyc=" + std::to_string(out.cyc) + " perc=" + std::to_string(out.perc) + ")");
    ag::backward(total);
    opt_gen_.step(current_lr_);
    if (on_update) on_update("gen");

    // Critic phase, D_X then D_Y, on pooled fakes.
    auto critic_update = [&](model::Discriminator& d, Adam& opt, ImagePool& pool,
                             const std::vector<Tensor>& reals, const std::vector<Tensor>& fakes,
                             const char* tag) {
        d.zero_grad();
        Var sum;
        for (std::size_t i = 0; i < reals.size(); ++i) {
            const Tensor pooled = pool.query(fakes[i], pool_rng_);
            const Var s_real = d.forward_train(ag::constant(reals[i]));
            const Var s_fake = d.forward_train(ag::constant(pooled));
            const Var l = loss::adversarial_disc_loss(s_real, s_fake, config_.gan_loss);
            sum = sum ? ag::add(sum, l) : l;
        }
        const Var l = ag::scale(sum, inv_b);
        const double lv = l->scalar();
        if (!std::isfinite(lv)) throw NonFiniteLoss(std::string("train_step: non-finite critic loss for ") + tag);
        ag::backward(l);
        opt.step(current_lr_);
        if (on_update) on_update(tag);
        return lv;
    };
    out.d_x = critic_update(d_x_, opt_dx_, pool_x_, targets_x, fakes_x, "d_x");
    out.d_y = critic_update(d_y_, opt_dy_, pool_y_, targets_y, fakes_y, "d_y");

    ++step_;
    return out;
}

TrainLog Trainer::train(const PreparedDomain& domain_x, const PreparedDomain& domain_y,
                        const std::vector<ValidationPair>* validation, const std::string& out_dir) {
    config_.validate();
    if (domain_x.empty() || domain_y.empty()) throw EmptyDataset("train: empty domain dataset");

    TrainLog log;
    std::ofstream step_csv, epoch_jsonl;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const bool resuming = epoch_ > 0;
        step_csv.open(out_dir + "/losses.csv", resuming ? std::ios::app : std::ios::out);
        epoch_jsonl.open(out_dir + "/epochs.jsonl", resuming ? std::ios::app : std::ios::out);
        if (step_csv.tellp() == 0) step_csv << "step,epoch,lr,adv,cyc,perc,total,d_x,d_y\n";
    }

    const std::size_t n = std::max(domain_x.size(), domain_y.size());
    const long steps_per_epoch =
        static_cast<long>((n + static_cast<std::size_t>(config_.batch_size) - 1) /
                          static_cast<std::size_t>(config_.batch_size));
    std::uniform_int_distribution<std::size_t> draw_x(0, domain_x.size() - 1);
    std::uniform_int_distribution<std::size_t> draw_y(0, domain_y.size() - 1);

    for (int e = epoch_ + 1; e <= config_.epochs; ++e) {
        current_lr_ = config_.lr_at_epoch(e);
        StepLosses acc;
        for (long s = 0; s < steps_per_epoch; ++s) {
            std::vector<Tensor> xb, yb;
            for (int b = 0; b < config_.batch_size; ++b) {
                xb.push_back(
                    crop_model_tensor(domain_x[draw_x(sampler_rng_)], config_.patch_size, sampler_rng_));
                yb.push_back(
                    crop_model_tensor(domain_y[draw_y(sampler_rng_)], config_.patch_size, sampler_rng_));
            }
            const StepLosses sl = train_step(xb, yb);
            acc.adv += sl.adv;
            acc.cyc += sl.cyc;
            acc.perc += sl.perc;
            acc.total += sl.total;
            acc.d_x += sl.d_x;
            acc.d_y += sl.d_y;
            log.steps.push_back({step_, e, current_lr_, sl});
            if (step_csv.is_open())
                step_csv << step_ << ',' << e << ',' << current_lr_ << ',' << sl.adv << ',' << sl.cyc
                         << ',' << sl.perc << ',' << sl.total << ',' << sl.d_x << ',' << sl.d_y << "\n";
        }
        epoch_ = e;

        EpochRecord er;
        er.epoch = e;
        er.lr = current_lr_;
        const double inv = 1.0 / static_cast<double>(steps_per_epoch);
        er.mean_losses = {acc.adv * inv, acc.cyc * inv, acc.perc * inv,
                          acc.total * inv, acc.d_x * inv, acc.d_y * inv};
        if (validation && !validation->empty()) {
            double psnr_acc = 0.0, ssim_acc = 0.0;
            for (const auto& vp : *validation) {
                const Tensor out = g_.infer(vp.input_model); // {1,H,W}
                Tensor out_hw({out.dim(1), out.dim(2)}, out.vec());
                const Tensor display = ctio::denormalize(out_hw, 0.0, 255.0);
                psnr_acc += metrics::psnr(vp.target_display, display, 255.0);
                ssim_acc += metrics::ssim(vp.target_display, display);
            }
            er.val_psnr = psnr_acc / static_cast<double>(validation->size());
            er.val_ssim = ssim_acc / static_cast<double>(validation->size());
        }
        log.epochs.push_back(er);
        if (epoch_jsonl.is_open()) {
            nlohmann::json j{{"epoch", e},
                             {"lr", current_lr_},
                             {"adv", er.mean_losses.adv},
                             {"cyc", er.mean_losses.cyc},
                             {"perc", er.mean_losses.perc},
                             {"total", er.mean_losses.total},
                             {"d_x", er.mean_losses.d_x},
                             {"d_y", er.mean_losses.d_y}};
            if (er.val_psnr) j["val_psnr"] = *er.val_psnr;
            if (er.val_ssim) j["val_ssim"] = *er.val_ssim;
            epoch_jsonl << j.dump() << "\n";
        }

        if (!out_dir.empty() && config_.checkpoint_every > 0 &&
            (e % config_.checkpoint_every == 0 || e == config_.epochs))
            save_checkpoint(out_dir + "/checkpoint_epoch_" + std::to_string(e));
    }
    return log;
}

// ---------------------------------------------------------------------------
// Checkpointing

namespace {

void write_param_set(const std::string& dir, const model::ModelParams& p) {
    fs::create_directories(dir);
    for (const auto& [name, t] : p.params) write_tensor(t, dir + "/" + name + ".tns");
}

void write_buffers(const std::string& dir, const model::ModelParams& p) {
    if (p.buffers.empty()) return;
    fs::create_directories(dir);
    for (const auto& [name, t] : p.buffers) write_tensor(t, dir + "/" + name + ".tns");
}

void write_moments(const std::string& dir, const Adam& opt) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < opt.m().size(); ++i) {
        write_tensor(opt.m()[i], dir + "/" + std::to_string(i) + ".m.tns");
        write_tensor(opt.v()[i], dir + "/" + std::to_string(i) + ".v.tns");
    }
}

void read_moments(const std::string& dir, Adam& opt, long t) {
    std::vector<Tensor> m, v;
    for (std::size_t i = 0; i < opt.params().size(); ++i) {
        m.push_back(read_tensor(dir + "/" + std::to_string(i) + ".m.tns"));
        v.push_back(read_tensor(dir + "/" + std::to_string(i) + ".v.tns"));
    }
    opt.restore(std::move(m), std::move(v), t);
}

Tensor stack_pool(const std::vector<Tensor>& items) {
    const auto& first = items.front();
    std::vector<int> shape = first.shape();
    shape.insert(shape.begin(), static_cast<int>(items.size()));
    Tensor out(shape);
    std::int64_t off = 0;
    for (const auto& t : items) {
        for (std::int64_t i = 0; i < t.numel(); ++i) out[off + i] = t[i];
        off += t.numel();
    }
    return out;
}

std::vector<Tensor> unstack_pool(const Tensor& stacked) {
    std::vector<int> shape(stacked.shape().begin() + 1, stacked.shape().end());
    const std::int64_t each = Tensor::checked_numel(shape);
    std::vector<Tensor> out;
    for (int i = 0; i < stacked.dim(0); ++i) {
        Tensor t(shape);
        for (std::int64_t k = 0; k < each; ++k) t[k] = stacked[i * each + k];
        out.push_back(std::move(t));
    }
    return out;
}

nlohmann::json load_manifest(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw DataError("checkpoint: cannot open " + dir + "/manifest.json");
    nlohmann::json j;
    in >> j;
    return j;
}

model::ModelParams read_param_set(const std::string& dir, const nlohmann::json& names,
                                  model::DimTag tag) {
    model::ModelParams p;
    p.tag = tag;
    for (const auto& n : names) {
        const std::string name = n.get<std::string>();
        p.params.emplace_back(name, read_tensor(dir + "/" + name + ".tns"));
    }
    return p;
}

} // namespace

void Trainer::save_checkpoint(const std::string& dir) const {
    fs::create_directories(dir);
    const model::ModelParams pg = g_.snapshot();
    const model::ModelParams pf = f_.snapshot();
    const model::ModelParams pdx = d_x_.snapshot();
    const model::ModelParams pdy = d_y_.snapshot();

    auto names_of = [](const model::ModelParams& p) {
        std::vector<std::string> ns;
        for (const auto& [n, t] : p.params) ns.push_back(n);
        return ns;
    };
    auto buffer_names_of = [](const model::ModelParams& p) {
        std::vector<std::string> ns;
        for (const auto& [n, t] : p.buffers) ns.push_back(n);
        return ns;
    };
    auto shapes_of = [](const model::ModelParams& p) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [n, t] : p.params) j[n] = t.shape();
        return j;
    };

    nlohmann::json manifest{
        {"schema", 1},
        {"spec_hash", spec_hash_},
        {"dim_tag", gen_spec_.input_slices == 3 ? "conv3d" : "conv2d"},
        {"epoch", epoch_},
        {"step", step_},
        {"config", config_},
        {"generator_spec", gen_spec_},
        {"discriminator_spec", disc_spec_},
        {"sampler_rng", rng_to_string(sampler_rng_)},
        {"pool_rng", rng_to_string(pool_rng_)},
        {"opt_t", {{"gen", opt_gen_.step_count()}, {"d_x", opt_dx_.step_count()}, {"d_y", opt_dy_.step_count()}}},
        {"networks",
         {{"G", names_of(pg)}, {"F", names_of(pf)}, {"DX", names_of(pdx)}, {"DY", names_of(pdy)}}},
        {"shapes",
         {{"G", shapes_of(pg)}, {"F", shapes_of(pf)}, {"DX", shapes_of(pdx)}, {"DY", shapes_of(pdy)}}},
        {"buffers", {{"DX", buffer_names_of(pdx)}, {"DY", buffer_names_of(pdy)}}},
        {"pool_x_count", static_cast<int>(pool_x_.items().size())},
        {"pool_y_count", static_cast<int>(pool_y_.items().size())},
    };
    std::ofstream mf(dir + "/manifest.json");
    mf << manifest.dump(2) << "\n";

    write_param_set(dir + "/params/G", pg);
    write_param_set(dir + "/params/F", pf);
    write_param_set(dir + "/params/DX", pdx);
    write_param_set(dir + "/params/DY", pdy);
    write_buffers(dir + "/buffers/DX", pdx);
    write_buffers(dir + "/buffers/DY", pdy);
    write_moments(dir + "/opt/gen", opt_gen_);
    write_moments(dir + "/opt/d_x", opt_dx_);
    write_moments(dir + "/opt/d_y", opt_dy_);
    if (!pool_x_.items().empty()) write_tensor(stack_pool(pool_x_.items()), dir + "/pool_x.tns");
    if (!pool_y_.items().empty()) write_tensor(stack_pool(pool_y_.items()), dir + "/pool_y.tns");
}

Trainer Trainer::load_checkpoint(const std::string& dir, const TrainConfig& config,
                                 bool fresh_optimizer) {
    const nlohmann::json manifest = load_manifest(dir);
    const model::GeneratorSpec gspec = manifest.at("generator_spec").get<model::GeneratorSpec>();
    const model::DiscriminatorSpec dspec =
        manifest.at("discriminator_spec").get<model::DiscriminatorSpec>();
    const model::DimTag tag =
        manifest.at("dim_tag").get<std::string>() == "conv3d" ? model::DimTag::conv3d : model::DimTag::conv2d;

    Trainer t(gspec, dspec, config);
    t.g_.load(read_param_set(dir + "/params/G", manifest.at("networks").at("G"), tag));
    t.f_.load(read_param_set(dir + "/params/F", manifest.at("networks").at("F"), tag));
    model::ModelParams pdx =
        read_param_set(dir + "/params/DX", manifest.at("networks").at("DX"), model::DimTag::conv2d);
    model::ModelParams pdy =
        read_param_set(dir + "/params/DY", manifest.at("networks").at("DY"), model::DimTag::conv2d);
    for (const auto& n : manifest.at("buffers").at("DX"))
        pdx.buffers.emplace_back(n.get<std::string>(),
                                 read_tensor(dir + "/buffers/DX/" + n.get<std::string>() + ".tns"));
    for (const auto& n : manifest.at("buffers").at("DY"))
        pdy.buffers.emplace_back(n.get<std::string>(),
                                 read_tensor(dir + "/buffers/DY/" + n.get<std::string>() + ".tns"));
    t.d_x_.load(pdx);
    t.d_y_.load(pdy);

    if (!fresh_optimizer) {
        read_moments(dir + "/opt/gen", t.opt_gen_, manifest.at("opt_t").at("gen").get<long>());
        read_moments(dir + "/opt/d_x", t.opt_dx_, manifest.at("opt_t").at("d_x").get<long>());
        read_moments(dir + "/opt/d_y", t.opt_dy_, manifest.at("opt_t").at("d_y").get<long>());
        rng_from_string(t.sampler_rng_, manifest.at("sampler_rng").get<std::string>());
        rng_from_string(t.pool_rng_, manifest.at("pool_rng").get<std::string>());
        t.epoch_ = manifest.at("epoch").get<int>();
        t.step_ = manifest.at("step").get<long>();
        if (manifest.at("pool_x_count").get<int>() > 0)
            t.pool_x_.restore(unstack_pool(read_tensor(dir + "/pool_x.tns")));
        if (manifest.at("pool_y_count").get<int>() > 0)
            t.pool_y_.restore(unstack_pool(read_tensor(dir + "/pool_y.tns")));
    }
    return t;
}

Trainer Trainer::migrate_to_2p5d(const std::string& checkpoint_dir, const TrainConfig& config) {
    const nlohmann::json manifest = load_manifest(checkpoint_dir);
    if (manifest.at("dim_tag").get<std::string>() == "conv3d")
        throw AlreadyInflated("migrate: checkpoint is already a 2.5D model");
    model::GeneratorSpec gspec = manifest.at("generator_spec").get<model::GeneratorSpec>();
    const model::DiscriminatorSpec dspec =
        manifest.at("discriminator_spec").get<model::DiscriminatorSpec>();

    const model::ModelParams pg2 =
        read_param_set(checkpoint_dir + "/params/G", manifest.at("networks").at("G"), model::DimTag::conv2d);
    const model::ModelParams pf2 =
        read_param_set(checkpoint_dir + "/params/F", manifest.at("networks").at("F"), model::DimTag::conv2d);

    gspec.input_slices = 3;
    Trainer t(gspec, dspec, config);
    t.g_.load(model::inflate_2d_to_3d(pg2));
    t.f_.load(model::inflate_2d_to_3d(pf2));

    // Discriminators judge single slices in either mode; reuse them directly.
    model::ModelParams pdx = read_param_set(checkpoint_dir + "/params/DX",
                                            manifest.at("networks").at("DX"), model::DimTag::conv2d);
    model::ModelParams pdy = read_param_set(checkpoint_dir + "/params/DY",
                                            manifest.at("networks").at("DY"), model::DimTag::conv2d);
    for (const auto& n : manifest.at("buffers").at("DX"))
        pdx.buffers.emplace_back(
            n.get<std::string>(),
            read_tensor(checkpoint_dir + "/buffers/DX/" + n.get<std::string>() + ".tns"));
    for (const auto& n : manifest.at("buffers").at("DY"))
        pdy.buffers.emplace_back(
            n.get<std::string>(),
            read_tensor(checkpoint_dir + "/buffers/DY/" + n.get<std::string>() + ".tns"));
    t.d_x_.load(pdx);
    t.d_y_.load(pdy);
    return t;
}

void Trainer::reinitialize_discriminators() {
    d_x_ = model::Discriminator(disc_spec_, mix_seed(config_.seed, 3));
    d_y_ = model::Discriminator(disc_spec_, mix_seed(config_.seed, 4));
    opt_dx_ = Adam(d_x_.parameters(), config_.adam_beta1, config_.adam_beta2);
    opt_dy_ = Adam(d_y_.parameters(), config_.adam_beta1, config_.adam_beta2);
}

std::string checkpoint_spec_hash(const std::string& dir) {
    return load_manifest(dir).at("spec_hash").get<std::string>();
}

model::GeneratorSpec checkpoint_generator_spec(const std::string& dir) {
    return load_manifest(dir).at("generator_spec").get<model::GeneratorSpec>();
}

model::DiscriminatorSpec checkpoint_discriminator_spec(const std::string& dir) {
    return load_manifest(dir).at("discriminator_spec").get<model::DiscriminatorSpec>();
}

TrainConfig checkpoint_train_config(const std::string& dir) {
    return load_manifest(dir).at("config").get<TrainConfig>();
}

model::ModelParams load_generator_params(const std::string& dir, const std::string& which) {
    const nlohmann::json manifest = load_manifest(dir);
    const model::DimTag tag =
        manifest.at("dim_tag").get<std::string>() == "conv3d" ? model::DimTag::conv3d : model::DimTag::conv2d;
    return read_param_set(dir + "/params/" + which, manifest.at("networks").at(which), tag);
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {
const char* gan_kind_name(loss::GanLossKind k) {
    return k == loss::GanLossKind::least_squares ? "least_squares" : "log_sigmoid";
}
loss::GanLossKind gan_kind_from(const std::string& s) {
    if (s == "least_squares") return loss::GanLossKind::least_squares;
    if (s == "log_sigmoid") return loss::GanLossKind::log_sigmoid;
    throw ConfigError("unknown gan_loss kind: " + s);
}
} // namespace

void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{{"epochs", c.epochs},
                       {"batch_size", c.batch_size},
                       {"learning_rate", c.learning_rate},
                       {"lr_decay_start_epoch", c.lr_decay_start_epoch},
                       {"lambda_adv", c.loss_weights.lambda_adv},
                       {"lambda_cyc", c.loss_weights.lambda_cyc},
                       {"lambda_perc", c.loss_weights.lambda_perc},
                       {"perceptual_taps", c.perceptual.layer_set},
                       {"perceptual_weights", c.perceptual.weights_omega},
                       {"perceptual_extractor", c.perceptual.extractor_id},
                       {"seed", c.seed},
                       {"patch_size", c.patch_size},
                       {"checkpoint_every", c.checkpoint_every},
                       {"image_pool_size", c.image_pool_size},
                       {"gan_loss", gan_kind_name(c.gan_loss)},
                       {"perceptual_on_translation", c.perceptual_on_translation},
                       {"adam_beta1", c.adam_beta1},
                       {"adam_beta2", c.adam_beta2}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
    TrainConfig d;
    c.epochs = j.value("epochs", d.epochs);
    c.batch_size = j.value("batch_size", d.batch_size);
    c.learning_rate = j.value("learning_rate", d.learning_rate);
    c.lr_decay_start_epoch = j.value("lr_decay_start_epoch", d.lr_decay_start_epoch);
    c.loss_weights.lambda_adv = j.value("lambda_adv", d.loss_weights.lambda_adv);
    c.loss_weights.lambda_cyc = j.value("lambda_cyc", d.loss_weights.lambda_cyc);
    c.loss_weights.lambda_perc = j.value("lambda_perc", d.loss_weights.lambda_perc);
    c.perceptual.layer_set = j.value("perceptual_taps", d.perceptual.layer_set);
    c.perceptual.weights_omega = j.value("perceptual_weights", d.perceptual.weights_omega);
    c.perceptual.extractor_id = j.value("perceptual_extractor", d.perceptual.extractor_id);
    c.seed = j.value("seed", d.seed);
    c.patch_size = j.value("patch_size", d.patch_size);
    c.checkpoint_every = j.value("checkpoint_every", d.checkpoint_every);
    c.image_pool_size = j.value("image_pool_size", d.image_pool_size);
    c.gan_loss = gan_kind_from(j.value("gan_loss", std::string(gan_kind_name(d.gan_loss))));
    c.perceptual_on_translation = j.value("perceptual_on_translation", d.perceptual_on_translation);
    c.adam_beta1 = j.value("adam_beta1", d.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", d.adam_beta2);
}

} // namespace ldct::train

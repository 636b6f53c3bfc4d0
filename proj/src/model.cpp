#include "ldct/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_map>

namespace ldct::model {

namespace {

using ag::Var;

const char* norm_name(Norm n) {
    switch (n) {
        case Norm::none: return "none";
        case Norm::batch: return "batch";
        case Norm::instance: return "instance";
    }
    return "none";
}

Norm norm_from(const std::string& s) {
    if (s == "none") return Norm::none;
    if (s == "batch") return Norm::batch;
    if (s == "instance") return Norm::instance;
    throw ConfigError("unknown norm kind: " + s);
}

const char* act_name(Act a) {
    switch (a) {
        case Act::relu: return "relu";
        case Act::leaky_relu_0_2: return "leaky_relu_0.2";
        case Act::tanh: return "tanh";
        case Act::sigmoid: return "sigmoid";
        case Act::none: return "none";
    }
    return "none";
}

Act act_from(const std::string& s) {
    if (s == "relu") return Act::relu;
    if (s == "leaky_relu_0.2") return Act::leaky_relu_0_2;
    if (s == "tanh") return Act::tanh;
    if (s == "sigmoid") return Act::sigmoid;
    if (s == "none") return Act::none;
    throw ConfigError("unknown activation kind: " + s);
}

Var apply_act(const Var& x, Act a) {
    switch (a) {
        case Act::relu: return ag::relu(x);
        case Act::leaky_relu_0_2: return ag::leaky_relu(x, 0.2);
        case Act::tanh: return ag::tanh_op(x);
        case Act::sigmoid: return ag::sigmoid_op(x);
        case Act::none: return x;
    }
    return x;
}

int norm_groups(const Tensor& t) {
    // {C,H,W} -> per channel; {C,D,H,W} -> per channel and depth plane, so the
    // 2.5D path normalizes each slice independently.
    return t.ndim() == 4 ? t.dim(0) * t.dim(1) : t.dim(0);
}

// Parameter store shared by the two network classes.
struct ParamBag {
    std::vector<Var> order;
    std::unordered_map<std::string, Var> by_name;

    Var add(const std::string& name, Tensor value) {
        Var v = ag::parameter(std::move(value), name);
        order.push_back(v);
        by_name.emplace(name, v);
        return v;
    }
    Var get(const std::string& name) const {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw SpecMismatch("missing parameter: " + name);
        return it->second;
    }
};

struct Init {
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss{0.0, 0.02};

    Tensor normal(std::vector<int> shape) {
        Tensor t(std::move(shape));
        for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = gauss(rng);
        return t;
    }
};

std::vector<int> conv_weight_shape(int out_ch, int in_ch, int k, bool is3d) {
    if (is3d) return {out_ch, in_ch, 3, k, k};
    return {out_ch, in_ch, k, k};
}

Var conv_nd(const Var& x, const Var& w, const Var& b, int stride, int pad, bool is3d) {
    return is3d ? ag::conv3d(x, w, b, stride, pad) : ag::conv2d(x, w, b, stride, pad);
}

} // namespace

GeneratorSpec GeneratorSpec::standard(int base_channels, int input_slices) {
    if (base_channels < 1) throw ConfigError("GeneratorSpec: base_channels must be >= 1");
    const int b = base_channels;
    GeneratorSpec s;
    s.input_slices = input_slices;
    s.encoder = {
        {b, 7, 1, 3, Norm::instance, Act::relu, false},
        {2 * b, 3, 2, 1, Norm::instance, Act::relu, false},
        {4 * b, 3, 2, 1, Norm::instance, Act::relu, false},
    };
    s.res_blocks = 9;
    s.decoder = {
        {2 * b, 3, 1, 1, Norm::instance, Act::relu, false},
        {b, 3, 1, 1, Norm::instance, Act::relu, false},
        {1, 7, 1, 3, Norm::none, Act::tanh, true},
    };
    s.attention_levels = {1, 2};
    return s;
}

void GeneratorSpec::validate() const {
    if (input_slices != 1 && input_slices != 3)
        throw SpecMismatch("GeneratorSpec: input_slices must be 1 or 3");
    if (res_blocks != 9) throw SpecMismatch("GeneratorSpec: res_blocks must be 9");
    if (encoder.empty()) throw SpecMismatch("GeneratorSpec: empty encoder");
    if (decoder.size() != encoder.size())
        throw SpecMismatch("GeneratorSpec: encoder and decoder depths must match");
    if (encoder.front().stride != 1)
        throw SpecMismatch("GeneratorSpec: first encoder layer must be stride 1");
    for (std::size_t i = 1; i < encoder.size(); ++i)
        if (encoder[i].stride != 2)
            throw SpecMismatch("GeneratorSpec: strided encoder layers must be stride 2");
    if (decoder.back().out_channels != 1 || decoder.back().activation != Act::tanh)
        throw SpecMismatch("GeneratorSpec: head must emit one channel through tanh");
    const int max_level = static_cast<int>(encoder.size()) - 1;
    for (int lvl : attention_levels)
        if (lvl < 1 || lvl > max_level)
            throw SpecMismatch("GeneratorSpec: attention level outside encoder depth");
    for (const auto& l : encoder)
        if (l.kernel < 1 || l.out_channels < 1) throw SpecMismatch("GeneratorSpec: bad encoder layer");
    for (const auto& l : decoder)
        if (l.kernel < 1 || l.out_channels < 1) throw SpecMismatch("GeneratorSpec: bad decoder layer");
}

int GeneratorSpec::downsample_factor() const {
    int f = 1;
    for (const auto& l : encoder) f *= l.stride;
    return f;
}

DiscriminatorSpec DiscriminatorSpec::standard() {
    DiscriminatorSpec s;
    s.layers = {
        {64, 4, 2, 1, Norm::none, Act::leaky_relu_0_2, true},
        {64, 1, 1, 0, Norm::batch, Act::leaky_relu_0_2, false},
        {128, 4, 2, 1, Norm::batch, Act::leaky_relu_0_2, false},
        {128, 1, 1, 0, Norm::batch, Act::leaky_relu_0_2, false},
        {256, 4, 2, 1, Norm::batch, Act::leaky_relu_0_2, false},
        {256, 1, 1, 0, Norm::batch, Act::leaky_relu_0_2, false},
        {512, 4, 1, 1, Norm::batch, Act::leaky_relu_0_2, false},
        {1, 4, 1, 1, Norm::none, Act::none, true},
    };
    return s;
}

DiscriminatorSpec DiscriminatorSpec::compact(int base_channels) {
    const int b = base_channels;
    DiscriminatorSpec s;
    s.layers = {
        {b, 4, 2, 1, Norm::none, Act::leaky_relu_0_2, true},
        {2 * b, 4, 2, 1, Norm::batch, Act::leaky_relu_0_2, false},
        {4 * b, 4, 1, 1, Norm::batch, Act::leaky_relu_0_2, false},
        {1, 4, 1, 1, Norm::none, Act::none, true},
    };
    return s;
}

void DiscriminatorSpec::validate() const {
    if (layers.empty()) throw SpecMismatch("DiscriminatorSpec: empty layer list");
    const auto& last = layers.back();
    if (last.out_channels != 1 || last.norm != Norm::none || last.activation != Act::none)
        throw SpecMismatch("DiscriminatorSpec: final layer must be 1 channel, no norm, no activation");
}

int receptive_field(const std::vector<ConvLayerSpec>& layers) {
    if (layers.empty()) throw SpecMismatch("receptive_field: empty layer list");
    int r = 1;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) r = (r - 1) * it->stride + it->kernel;
    return r;
}

void receptive_interval(const std::vector<ConvLayerSpec>& layers, int out_coord, int& lo, int& hi) {
    lo = out_coord;
    hi = out_coord;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
        lo = lo * it->stride - it->padding;
        hi = hi * it->stride - it->padding + it->kernel - 1;
    }
}

int conv_stack_out_dim(const std::vector<ConvLayerSpec>& layers, int in_dim) {
    int d = in_dim;
    for (const auto& l : layers) d = (d + 2 * l.padding - l.kernel) / l.stride + 1;
    return d;
}

const Tensor* ModelParams::find(const std::string& name) const {
    for (const auto& [n, t] : params)
        if (n == name) return &t;
    return nullptr;
}

std::int64_t ModelParams::total_parameter_count() const {
    std::int64_t n = 0;
    for (const auto& [name, t] : params) n += t.numel();
    return n;
}

ModelParams inflate_2d_to_3d(const ModelParams& params2d) {
    if (params2d.tag == DimTag::conv3d) throw AlreadyInflated("inflate: parameters are already 3D");
    ModelParams out;
    out.tag = DimTag::conv3d;
    for (const auto& [name, t] : params2d.params) {
        if (t.ndim() == 4) {
            const int oc = t.dim(0), ic = t.dim(1), kh = t.dim(2), kw = t.dim(3);
            Tensor w3({oc, ic, 3, kh, kw});
            const std::int64_t tap = static_cast<std::int64_t>(kh) * kw;
            for (int o = 0; o < oc; ++o)
                for (int i = 0; i < ic; ++i)
                    for (std::int64_t k = 0; k < tap; ++k)
                        w3[((static_cast<std::int64_t>(o) * ic + i) * 3 + 1) * tap + k] =
                            t[(static_cast<std::int64_t>(o) * ic + i) * tap + k];
            out.params.emplace_back(name, std::move(w3));
        } else {
            out.params.emplace_back(name, t);
        }
    }
    out.buffers = params2d.buffers;
    return out;
}

ag::Var attention_gate(const ag::Var& skip_features, const ag::Var& decoder_features,
                       const AttentionGateParams& p) {
    if (!skip_features->value.same_shape(decoder_features->value) &&
        skip_features->value.shape().size() != decoder_features->value.shape().size())
        throw ShapeMismatch("attention_gate: feature ranks differ");
    for (int i = 1; i < skip_features->value.ndim(); ++i)
        if (skip_features->value.dim(i) != decoder_features->value.dim(i))
            throw ShapeMismatch("attention_gate: spatial dims differ");
    const bool is3d = skip_features->value.ndim() == 4;
    const Var lhs = conv_nd(decoder_features, p.w_h, nullptr, 1, 0, is3d);
    const Var rhs = conv_nd(skip_features, p.w_l, p.b_l, 1, 0, is3d);
    const Var pre = ag::relu(ag::add(lhs, rhs));
    const Var q = conv_nd(pre, p.psi, p.b_psi, 1, 0, is3d);
    const Var a = ag::sigmoid_op(q);
    return ag::gate_mul(a, skip_features);
}

// ---------------------------------------------------------------------------
// Generator

Generator::Generator(GeneratorSpec spec, std::uint64_t init_seed) : spec_(std::move(spec)) {
    spec_.validate();
    build_params(init_seed);
}

Generator::Generator(GeneratorSpec spec, const ModelParams& params) : spec_(std::move(spec)) {
    spec_.validate();
    build_params(0);
    load(params);
}

void Generator::build_params(std::uint64_t seed) {
    const bool is3d = spec_.input_slices == 3;
    Init init{std::mt19937_64(seed)};
    ParamBag bag;

    auto add_conv = [&](const std::string& prefix, const ConvLayerSpec& l, int in_ch) {
        bag.add(prefix + ".weight", init.normal(conv_weight_shape(l.out_channels, in_ch, l.kernel, is3d)));
        if (l.bias) bag.add(prefix + ".bias", Tensor({l.out_channels}, 0.0));
        if (l.norm != Norm::none) {
            bag.add(prefix + ".gamma", Tensor({l.out_channels}, 1.0));
            bag.add(prefix + ".beta", Tensor({l.out_channels}, 0.0));
        }
    };

    int ch = 1;
    for (std::size_t i = 0; i < spec_.encoder.size(); ++i) {
        add_conv("enc" + std::to_string(i), spec_.encoder[i], ch);
        ch = spec_.encoder[i].out_channels;
    }
    const int trunk = ch;
    for (int j = 0; j < spec_.res_blocks; ++j) {
        const std::string p = "res" + std::to_string(j);
        const ConvLayerSpec rl{trunk, 3, 1, 1, Norm::instance, Act::none, false};
        add_conv(p + ".conv1", rl, trunk);
        add_conv(p + ".conv2", rl, trunk);
    }

    const int levels = static_cast<int>(spec_.encoder.size());
    int d_ch = trunk;
    for (std::size_t i = 0; i < spec_.decoder.size(); ++i) {
        const int level = levels - 1 - static_cast<int>(i);
        int in_ch = d_ch;
        if (level >= 1) {
            const int skip_ch = spec_.encoder[static_cast<std::size_t>(level)].out_channels;
            const bool gated = std::find(spec_.attention_levels.begin(), spec_.attention_levels.end(),
                                         level) != spec_.attention_levels.end();
            if (gated) {
                const int inter = std::max(1, skip_ch / 2);
                const std::string p = "attn" + std::to_string(level);
                bag.add(p + ".w_l", init.normal(conv_weight_shape(inter, skip_ch, 1, is3d)));
                bag.add(p + ".w_h", init.normal(conv_weight_shape(inter, d_ch, 1, is3d)));
                bag.add(p + ".b_l", Tensor({inter}, 0.0));
                bag.add(p + ".psi", init.normal(conv_weight_shape(1, inter, 1, is3d)));
                bag.add(p + ".b_psi", Tensor({1}, 0.0));
            }
            in_ch += skip_ch;
        }
        add_conv("dec" + std::to_string(i), spec_.decoder[i], in_ch);
        d_ch = spec_.decoder[i].out_channels;
    }

    param_order_ = std::move(bag.order);
}

ag::Var Generator::find_param(const std::string& name) const {
    for (const auto& v : param_order_)
        if (v->name == name) return v;
    throw SpecMismatch("generator parameter not found: " + name);
}

ag::Var Generator::forward(const ag::Var& x) const {
    const bool is3d = spec_.input_slices == 3;
    const Tensor& xv = x->value;
    if (is3d) {
        if (xv.ndim() != 4 || xv.dim(0) != 1 || xv.dim(1) != 3)
            throw ShapeMismatch("generator: expected {1,3,H,W} input for the 2.5D network");
    } else {
        if (xv.ndim() != 3 || xv.dim(0) != 1)
            throw ShapeMismatch("generator: expected {1,H,W} input");
    }
    const int H = xv.dim(xv.ndim() - 2), W = xv.dim(xv.ndim() - 1);
    const int factor = spec_.downsample_factor();
    if (H % factor != 0 || W % factor != 0)
        throw ShapeMismatch("generator: spatial dims must be divisible by " + std::to_string(factor));

    auto layer = [&](const Var& input, const std::string& prefix, const ConvLayerSpec& l, Act act) {
        const Var w = find_param(prefix + ".weight");
        const Var b = l.bias ? find_param(prefix + ".bias") : nullptr;
        Var y = conv_nd(input, w, b, l.stride, l.padding, is3d);
        if (l.norm != Norm::none) {
            y = ag::group_norm(y, find_param(prefix + ".gamma"), find_param(prefix + ".beta"),
                               norm_groups(y->value));
        }
        return apply_act(y, act);
    };

    std::vector<Var> enc;
    Var h = x;
    for (std::size_t i = 0; i < spec_.encoder.size(); ++i) {
        h = layer(h, "enc" + std::to_string(i), spec_.encoder[i], spec_.encoder[i].activation);
        enc.push_back(h);
    }

    const int trunk = spec_.encoder.back().out_channels;
    const ConvLayerSpec rl{trunk, 3, 1, 1, Norm::instance, Act::none, false};
    for (int j = 0; j < spec_.res_blocks; ++j) {
        const std::string p = "res" + std::to_string(j);
        Var y = layer(h, p + ".conv1", rl, Act::relu);
        y = layer(y, p + ".conv2", rl, Act::none);
        h = ag::add(h, y);
    }

    const int levels = static_cast<int>(spec_.encoder.size());
    for (std::size_t i = 0; i < spec_.decoder.size(); ++i) {
        const int level = levels - 1 - static_cast<int>(i);
        if (level >= 1) {
            const Var skip = enc[static_cast<std::size_t>(level)];
            const bool gated = std::find(spec_.attention_levels.begin(), spec_.attention_levels.end(),
                                         level) != spec_.attention_levels.end();
            Var s = skip;
            if (gated) {
                const std::string p = "attn" + std::to_string(level);
                AttentionGateParams gp{find_param(p + ".w_l"), find_param(p + ".w_h"),
                                       find_param(p + ".b_l"), find_param(p + ".psi"),
                                       find_param(p + ".b_psi")};
                s = attention_gate(skip, h, gp);
            }
            h = ag::concat_ch(h, s);
        }
        h = layer(h, "dec" + std::to_string(i), spec_.decoder[i], spec_.decoder[i].activation);
        if (i + 1 < spec_.decoder.size()) h = ag::upsample2x(h);
    }

    if (is3d) h = ag::center_depth(h);
    return h;
}

Tensor Generator::infer(const Tensor& x) const { return forward(ag::constant(x))->value; }

ModelParams Generator::snapshot() const {
    ModelParams out;
    out.tag = spec_.input_slices == 3 ? DimTag::conv3d : DimTag::conv2d;
    for (const auto& v : param_order_) out.params.emplace_back(v->name, v->value);
    return out;
}

void Generator::load(const ModelParams& params) {
    const DimTag expect = spec_.input_slices == 3 ? DimTag::conv3d : DimTag::conv2d;
    if (params.tag != expect) throw SpecMismatch("generator: dimensionality tag mismatch");
    if (params.params.size() != param_order_.size())
        throw SpecMismatch("generator: parameter list size mismatch");
    for (const auto& [name, t] : params.params) {
        Var v = find_param(name);
        if (!v->value.same_shape(t)) throw SpecMismatch("generator: shape mismatch for " + name);
        v->value = t;
    }
}

void Generator::zero_grad() const {
    for (const auto& v : param_order_) v->zero_grad();
}

// ---------------------------------------------------------------------------
// Discriminator

Discriminator::Discriminator(DiscriminatorSpec spec, std::uint64_t init_seed) : spec_(std::move(spec)) {
    spec_.validate();
    build_params(init_seed);
}

Discriminator::Discriminator(DiscriminatorSpec spec, const ModelParams& params) : spec_(std::move(spec)) {
    spec_.validate();
    build_params(0);
    load(params);
}

void Discriminator::build_params(std::uint64_t seed) {
    Init init{std::mt19937_64(seed)};
    ParamBag bag;
    running_mean_.clear();
    running_var_.clear();
    int ch = 1;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const auto& l = spec_.layers[i];
        const std::string p = "layer" + std::to_string(i);
        bag.add(p + ".weight", init.normal({l.out_channels, ch, l.kernel, l.kernel}));
        if (l.bias) bag.add(p + ".bias", Tensor({l.out_channels}, 0.0));
        if (l.norm == Norm::batch || l.norm == Norm::instance) {
            bag.add(p + ".gamma", Tensor({l.out_channels}, 1.0));
            bag.add(p + ".beta", Tensor({l.out_channels}, 0.0));
        }
        running_mean_.push_back(Tensor({l.out_channels}, 0.0));
        running_var_.push_back(Tensor({l.out_channels}, 1.0));
        ch = l.out_channels;
    }
    param_order_ = std::move(bag.order);
}

ag::Var Discriminator::forward_impl(const ag::Var& x, bool train_stats) {
    const Tensor& xv = x->value;
    if (xv.ndim() != 3 || xv.dim(0) != 1) throw ShapeMismatch("discriminator: expected {1,H,W} input");
    const int rf = min_input();
    if (xv.dim(1) < rf || xv.dim(2) < rf)
        throw ShapeMismatch("discriminator: input below the " + std::to_string(rf) + "px receptive field");

    auto find = [&](const std::string& name) -> Var {
        for (const auto& v : param_order_)
            if (v->name == name) return v;
        throw SpecMismatch("discriminator parameter not found: " + name);
    };

    constexpr double kMomentum = 0.1;
    Var h = x;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const auto& l = spec_.layers[i];
        const std::string p = "layer" + std::to_string(i);
        const Var w = find(p + ".weight");
        const Var b = l.bias ? find(p + ".bias") : nullptr;
        h = ag::conv2d(h, w, b, l.stride, l.padding);
        if (l.norm == Norm::batch || l.norm == Norm::instance) {
            const Var gamma = find(p + ".gamma");
            const Var beta = find(p + ".beta");
            if (train_stats) {
                // EMA of the per-channel statistics feeds the scoring forward.
                const Tensor& hv = h->value;
                const int C = hv.dim(0);
                const std::int64_t m = hv.numel() / C;
                for (int c = 0; c < C; ++c) {
                    double mu = 0.0;
                    for (std::int64_t k = 0; k < m; ++k) mu += hv[c * m + k];
                    mu /= static_cast<double>(m);
                    double var = 0.0;
                    for (std::int64_t k = 0; k < m; ++k) {
                        const double d = hv[c * m + k] - mu;
                        var += d * d;
                    }
                    var /= static_cast<double>(m);
                    running_mean_[i][c] = (1.0 - kMomentum) * running_mean_[i][c] + kMomentum * mu;
                    running_var_[i][c] = (1.0 - kMomentum) * running_var_[i][c] + kMomentum * var;
                }
                h = ag::group_norm(h, gamma, beta, hv.dim(0));
            } else {
                h = ag::fixed_norm(h, running_mean_[i], running_var_[i], gamma, beta);
            }
        }
        h = apply_act(h, l.activation);
    }
    return h;
}

ag::Var Discriminator::forward_train(const ag::Var& x) { return forward_impl(x, true); }

Tensor Discriminator::forward_eval(const Tensor& x) const {
    // Statistics are fixed here, so this is const in effect; forward_impl is
    // shared with the training path which does mutate the EMA buffers.
    return const_cast<Discriminator*>(this)->forward_impl(ag::constant(x), false)->value;
}

ModelParams Discriminator::snapshot() const {
    ModelParams out;
    out.tag = DimTag::conv2d;
    for (const auto& v : param_order_) out.params.emplace_back(v->name, v->value);
    for (std::size_t i = 0; i < running_mean_.size(); ++i) {
        out.buffers.emplace_back("layer" + std::to_string(i) + ".running_mean", running_mean_[i]);
        out.buffers.emplace_back("layer" + std::to_string(i) + ".running_var", running_var_[i]);
    }
    return out;
}

void Discriminator::load(const ModelParams& params) {
    if (params.tag != DimTag::conv2d) throw SpecMismatch("discriminator: expected 2D parameters");
    if (params.params.size() != param_order_.size())
        throw SpecMismatch("discriminator: parameter list size mismatch");
    for (const auto& [name, t] : params.params) {
        bool found = false;
        for (const auto& v : param_order_) {
            if (v->name == name) {
                if (!v->value.same_shape(t)) throw SpecMismatch("discriminator: shape mismatch for " + name);
                v->value = t;
                found = true;
                break;
            }
        }
        if (!found) throw SpecMismatch("discriminator: unexpected parameter " + name);
    }
    for (const auto& [name, t] : params.buffers) {
        for (std::size_t i = 0; i < running_mean_.size(); ++i) {
            const std::string p = "layer" + std::to_string(i);
            if (name == p + ".running_mean") running_mean_[i] = t;
            if (name == p + ".running_var") running_var_[i] = t;
        }
    }
}

void Discriminator::zero_grad() const {
    for (const auto& v : param_order_) v->zero_grad();
}

// ---------------------------------------------------------------------------
// Spec-level wrappers

ModelParams build_generator(const GeneratorSpec& spec, std::uint64_t init_seed) {
    return Generator(spec, init_seed).snapshot();
}

Tensor generator_forward(const GeneratorSpec& spec, const ModelParams& params, const Tensor& x) {
    Generator g(spec, params);
    return g.infer(x);
}

ModelParams build_discriminator(const DiscriminatorSpec& spec, std::uint64_t init_seed) {
    return Discriminator(spec, init_seed).snapshot();
}

Tensor discriminator_forward(const DiscriminatorSpec& spec, const ModelParams& params, const Tensor& x) {
    Discriminator d(spec, params);
    return d.forward_eval(x);
}

// ---------------------------------------------------------------------------
// JSON + hashing

void to_json(nlohmann::json& j, const ConvLayerSpec& s) {
    j = nlohmann::json{{"out_channels", s.out_channels}, {"kernel", s.kernel},
                       {"stride", s.stride},             {"padding", s.padding},
                       {"norm", norm_name(s.norm)},      {"activation", act_name(s.activation)},
                       {"bias", s.bias}};
}

void from_json(const nlohmann::json& j, ConvLayerSpec& s) {
    s.out_channels = j.at("out_channels").get<int>();
    s.kernel = j.at("kernel").get<int>();
    s.stride = j.at("stride").get<int>();
    s.padding = j.at("padding").get<int>();
    s.norm = norm_from(j.at("norm").get<std::string>());
    s.activation = act_from(j.at("activation").get<std::string>());
    s.bias = j.at("bias").get<bool>();
}

void to_json(nlohmann::json& j, const GeneratorSpec& s) {
    j = nlohmann::json{{"input_slices", s.input_slices},
                       {"encoder", s.encoder},
                       {"res_blocks", s.res_blocks},
                       {"decoder", s.decoder},
                       {"attention_levels", s.attention_levels}};
}

void from_json(const nlohmann::json& j, GeneratorSpec& s) {
    s.input_slices = j.at("input_slices").get<int>();
    s.encoder = j.at("encoder").get<std::vector<ConvLayerSpec>>();
    s.res_blocks = j.at("res_blocks").get<int>();
    s.decoder = j.at("decoder").get<std::vector<ConvLayerSpec>>();
    s.attention_levels = j.at("attention_levels").get<std::vector<int>>();
}

void to_json(nlohmann::json& j, const DiscriminatorSpec& s) {
    j = nlohmann::json{{"layers", s.layers}};
}

void from_json(const nlohmann::json& j, DiscriminatorSpec& s) {
    s.layers = j.at("layers").get<std::vector<ConvLayerSpec>>();
}

std::string spec_hash(const GeneratorSpec& gen, const DiscriminatorSpec& disc) {
    nlohmann::json j{{"generator", gen}, {"discriminator", disc}};
    const std::string dump = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace ldct::model

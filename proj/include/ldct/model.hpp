#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldct/autograd.hpp"
#include "ldct/tensor.hpp"

namespace ldct::model {

enum class Norm { none, batch, instance };
enum class Act { relu, leaky_relu_0_2, tanh, sigmoid, none };

struct ConvLayerSpec {
    int out_channels = 1;
    int kernel = 3;
    int stride = 1;
    int padding = 1;
    Norm norm = Norm::none;
    Act activation = Act::none;
    bool bias = true;
};

// Encoder / residual trunk / decoder generator with attention-gated skip
// connections. attention_levels lists the encoder depths (1-based from the
// first strided layer) whose skips pass through an attention gate.
struct GeneratorSpec {
    int input_slices = 1; // 1 = 2D, 3 = 2.5D
    std::vector<ConvLayerSpec> encoder;
    int res_blocks = 9;
    std::vector<ConvLayerSpec> decoder;
    std::vector<int> attention_levels;

    // base_channels scales the whole ladder; 64 gives the full-size network
    // (64/128/256, nine 256-channel residual blocks).
    static GeneratorSpec standard(int base_channels = 64, int input_slices = 1);
    void validate() const;
    int downsample_factor() const;
};

struct DiscriminatorSpec {
    std::vector<ConvLayerSpec> layers;

    // Eight-layer 70x70 patch critic: channel ladder 64,64,128,128,256,256,512,1
    // with stride-2 k4 stages interleaved with k1 mixing layers.
    static DiscriminatorSpec standard();
    // Shallow variant for sub-70px training images (receptive field 34).
    static DiscriminatorSpec compact(int base_channels = 16);
    void validate() const;
};

// Backward recursion r <- (r-1)*stride + kernel starting from r = 1.
int receptive_field(const std::vector<ConvLayerSpec>& layers);
// Input span [lo, hi] (before clipping) feeding one output coordinate.
void receptive_interval(const std::vector<ConvLayerSpec>& layers, int out_coord, int& lo, int& hi);
int conv_stack_out_dim(const std::vector<ConvLayerSpec>& layers, int in_dim);

enum class DimTag { conv2d, conv3d };

// Serializable weights: named parameter arrays plus non-trainable buffers
// (batch-norm running statistics).
struct ModelParams {
    DimTag tag = DimTag::conv2d;
    std::vector<std::pair<std::string, Tensor>> params;
    std::vector<std::pair<std::string, Tensor>> buffers;

    const Tensor* find(const std::string& name) const;
    std::int64_t total_parameter_count() const;
};

// Every KxK conv kernel becomes 3xKxK with the source kernel in the middle
// depth plane and zeros elsewhere; vectors copy through unchanged.
ModelParams inflate_2d_to_3d(const ModelParams& params2d);

struct AttentionGateParams {
    ag::Var w_l;   // 1x1 conv over the skip features
    ag::Var w_h;   // 1x1 conv over the decoder features
    ag::Var b_l;   // bias inside the rectifier
    ag::Var psi;   // 1x1 conv to a single-channel response
    ag::Var b_psi; // bias outside the rectifier
};

// q = psi * relu(W_h h + W_l l + b_l) + b_psi; a = sigmoid(q); returns a (.) F_l.
ag::Var attention_gate(const ag::Var& skip_features, const ag::Var& decoder_features,
                       const AttentionGateParams& params);

class Generator {
  public:
    Generator(GeneratorSpec spec, std::uint64_t init_seed);
    Generator(GeneratorSpec spec, const ModelParams& params);

    // x is {1,H,W} (2D) or {1,3,H,W} (2.5D); output is always {1,H,W} in (-1,1).
    ag::Var forward(const ag::Var& x) const;
    Tensor infer(const Tensor& x) const;

    const GeneratorSpec& spec() const { return spec_; }
    const std::vector<ag::Var>& parameters() const { return param_order_; }
    ModelParams snapshot() const;
    void load(const ModelParams& params);
    void zero_grad() const;

  private:
    void build_params(std::uint64_t seed);
    GeneratorSpec spec_;
    std::vector<ag::Var> param_order_;
    ag::Var find_param(const std::string& name) const;
};

class Discriminator {
  public:
    Discriminator(DiscriminatorSpec spec, std::uint64_t init_seed);
    Discriminator(DiscriminatorSpec spec, const ModelParams& params);

    // Training forward: batch statistics in the norm layers (running stats
    // are updated as a side effect).
    ag::Var forward_train(const ag::Var& x);
    // Scoring forward: fixed running statistics, so every output location
    // depends on exactly its receptive-field patch.
    Tensor forward_eval(const Tensor& x) const;

    const DiscriminatorSpec& spec() const { return spec_; }
    int min_input() const { return receptive_field(spec_.layers); }
    const std::vector<ag::Var>& parameters() const { return param_order_; }
    ModelParams snapshot() const;
    void load(const ModelParams& params);
    void zero_grad() const;

  private:
    void build_params(std::uint64_t seed);
    ag::Var forward_impl(const ag::Var& x, bool train_stats);
    DiscriminatorSpec spec_;
    std::vector<ag::Var> param_order_;
    std::vector<Tensor> running_mean_;
    std::vector<Tensor> running_var_;
};

// Spec-level convenience wrappers.
ModelParams build_generator(const GeneratorSpec& spec, std::uint64_t init_seed);
Tensor generator_forward(const GeneratorSpec& spec, const ModelParams& params, const Tensor& x);
ModelParams build_discriminator(const DiscriminatorSpec& spec, std::uint64_t init_seed);
Tensor discriminator_forward(const DiscriminatorSpec& spec, const ModelParams& params, const Tensor& x);

// JSON round trips for configs and checkpoint manifests.
void to_json(nlohmann::json& j, const ConvLayerSpec& s);
void from_json(const nlohmann::json& j, ConvLayerSpec& s);
void to_json(nlohmann::json& j, const GeneratorSpec& s);
void from_json(const nlohmann::json& j, GeneratorSpec& s);
void to_json(nlohmann::json& j, const DiscriminatorSpec& s);
void from_json(const nlohmann::json& j, DiscriminatorSpec& s);

// FNV-1a over the canonical JSON of both specs; pins checkpoints to an
// architecture.
std::string spec_hash(const GeneratorSpec& gen, const DiscriminatorSpec& disc);

} // namespace ldct::model

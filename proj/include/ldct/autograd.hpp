#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ldct/tensor.hpp"

namespace ldct::ag {

// Define-by-run reverse-mode autodiff over Tensor. A forward pass builds the
// graph; backward() walks it once in reverse topological order. Parameter
// leaves keep their gradient buffers across steps (zeroed explicitly by the
// optimizer), intermediate nodes are dropped with the graph.
struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool grad_ready = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;
    std::string name;

    Tensor& ensure_grad() {
        if (!grad_ready) {
            grad = Tensor(value.shape());
            grad_ready = true;
        }
        return grad;
    }
    void zero_grad() {
        if (grad_ready) grad.fill(0.0);
    }
    double scalar() const { return value[0]; }
};

using Var = std::shared_ptr<Node>;

Var constant(Tensor v);
Var parameter(Tensor v, std::string name = "");
Var detach(const Var& x);

// Convolutions; bias may be nullptr.
Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad);
Var conv3d(const Var& x, const Var& w, const Var& bias, int stride, int pad);

// Per-group normalization (instance norm on {C,H,W}; per (channel, slice) on
// {C,D,H,W} so the 2.5D path never mixes depth planes).
Var group_norm(const Var& x, const Var& gamma, const Var& beta, int groups, double eps = 1e-5);
// Pointwise normalization with fixed per-channel statistics (batch-norm eval mode).
Var fixed_norm(const Var& x, const Tensor& mean, const Tensor& var, const Var& gamma,
               const Var& beta, double eps = 1e-5);

Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);
Var tanh_op(const Var& x);
Var sigmoid_op(const Var& x);
Var softplus(const Var& x);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var square(const Var& a);
Var abs_op(const Var& a);
Var mean_all(const Var& a);

// gate {1,...} multiplies x {C,...} broadcast over the channel axis.
Var gate_mul(const Var& gate, const Var& x);
Var concat_ch(const Var& a, const Var& b);
Var upsample2x(const Var& x);

// {C,3,H,W} -> {C,H,W} (slice-wise inference head of the 2.5D generator).
Var center_depth(const Var& x);
// {C,H,W} -> {C,3,H,W} by replicating the slice into all depth planes.
Var replicate_depth3(const Var& x);

void backward(const Var& root);

} // namespace ldct::ag

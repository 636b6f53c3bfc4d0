#pragma once

#include "ldct/tensor.hpp"

namespace ldct::kern {

// Inner compute kernels for the network stack. The default entry points are
// OpenMP-parallel; kern::ref holds plain serial implementations used by the
// unit tests and the kernel benchmark. Both variants sum each output element
// in the same (ic, kd, ky, kx) order, so results agree to rounding and runs
// are reproducible for any thread count.

inline int conv_out_dim(int in, int kernel, int stride, int pad) {
    return (in + 2 * pad - kernel) / stride + 1;
}

// 2D convolution, x {C,H,W}, w {OC,IC,KH,KW}, bias {OC} (optional, may be null).
void conv2d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad);
void conv2d_backward_input(Tensor& gx, const Tensor& gout, const Tensor& w, int stride, int pad);
void conv2d_backward_weight(Tensor& gw, Tensor* gbias, const Tensor& gout, const Tensor& x,
                            int stride, int pad);

// Depth-3 convolution for the 2.5D path, x {C,D,H,W}, w {OC,IC,3,KH,KW}.
// Depth axis is stride 1 with zero padding 1, so D is preserved.
void conv3d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad);
void conv3d_backward_input(Tensor& gx, const Tensor& gout, const Tensor& w, int stride, int pad);
void conv3d_backward_weight(Tensor& gw, Tensor* gbias, const Tensor& gout, const Tensor& x,
                            int stride, int pad);

// Per-group normalization over `group_size` contiguous elements. Channel
// groups give instance norm on {C,H,W} and slice-wise norm on {C,D,H,W}.
void group_norm_forward(Tensor& out, Tensor& mean, Tensor& inv_std, const Tensor& x,
                        const Tensor& gamma, const Tensor& beta, int groups, double eps);
void group_norm_backward(Tensor& gx, Tensor& ggamma, Tensor& gbeta, const Tensor& gout,
                         const Tensor& x, const Tensor& mean, const Tensor& inv_std,
                         const Tensor& gamma, int groups);

// Nearest-neighbour 2x upsampling of the last two axes.
void upsample2x_forward(Tensor& out, const Tensor& x);
void upsample2x_backward(Tensor& gx, const Tensor& gout);

namespace ref {
void conv2d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad);
void conv2d_backward_input(Tensor& gx, const Tensor& gout, const Tensor& w, int stride, int pad);
void conv2d_backward_weight(Tensor& gw, Tensor* gbias, const Tensor& gout, const Tensor& x,
                            int stride, int pad);
void conv3d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad);
void group_norm_forward(Tensor& out, Tensor& mean, Tensor& inv_std, const Tensor& x,
                        const Tensor& gamma, const Tensor& beta, int groups, double eps);
void upsample2x_forward(Tensor& out, const Tensor& x);
} // namespace ref

} // namespace ldct::kern

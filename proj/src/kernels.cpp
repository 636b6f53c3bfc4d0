#include "ldct/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ldct::kern {

namespace {

// Valid ox range so that ix = ox*stride + ix0 lands in [0, W).
inline void ox_range(int ix0, int stride, int W, int OW, int& ox_lo, int& ox_hi) {
    int lo = 0, hi = OW - 1;
    if (ix0 < 0) lo = (-ix0 + stride - 1) / stride;
    int max_ix = W - 1 - ix0;
    if (max_ix < 0) {
        ox_lo = 0;
        ox_hi = -1;
        return;
    }
    hi = std::min(hi, max_ix / stride);
    ox_lo = lo;
    ox_hi = hi;
}

struct Conv2dDims {
    int C, H, W, OC, IC, KH, KW, OH, OW;
};

Conv2dDims conv2d_dims(const Tensor& x, const Tensor& w, int stride, int pad) {
    if (x.ndim() != 3 || w.ndim() != 4) throw ShapeMismatch("conv2d: expected {C,H,W} and {OC,IC,KH,KW}");
    Conv2dDims d{x.dim(0), x.dim(1), x.dim(2), w.dim(0), w.dim(1), w.dim(2), w.dim(3), 0, 0};
    if (d.C != d.IC) throw ShapeMismatch("conv2d: input channels do not match weight");
    d.OH = conv_out_dim(d.H, d.KH, stride, pad);
    d.OW = conv_out_dim(d.W, d.KW, stride, pad);
    if (d.OH <= 0 || d.OW <= 0) throw ShapeMismatch("conv2d: output would be empty");
    return d;
}

struct Conv3dDims {
    int C, D, H, W, OC, IC, KH, KW, OH, OW;
};

Conv3dDims conv3d_dims(const Tensor& x, const Tensor& w, int stride, int pad) {
    if (x.ndim() != 4 || w.ndim() != 5) throw ShapeMismatch("conv3d: expected {C,D,H,W} and {OC,IC,3,KH,KW}");
    if (w.dim(2) != 3) throw ShapeMismatch("conv3d: depth kernel must be 3");
    Conv3dDims d{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(1), w.dim(3), w.dim(4), 0, 0};
    if (d.C != d.IC) throw ShapeMismatch("conv3d: input channels do not match weight");
    d.OH = conv_out_dim(d.H, d.KH, stride, pad);
    d.OW = conv_out_dim(d.W, d.KW, stride, pad);
    if (d.OH <= 0 || d.OW <= 0) throw ShapeMismatch("conv3d: output would be empty");
    return d;
}

} // namespace

void conv2d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad) {
    const Conv2dDims d = conv2d_dims(x, w, stride, pad);
    out = Tensor({d.OC, d.OH, d.OW});
    const double* xp = x.data();
    const double* wp = w.data();
    double* op = out.data();

#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < d.OC; ++oc) {
        double* outc = op + static_cast<std::size_t>(oc) * d.OH * d.OW;
        const double b = bias ? (*bias)[oc] : 0.0;
        std::fill(outc, outc + static_cast<std::size_t>(d.OH) * d.OW, b);
        for (int ic = 0; ic < d.IC; ++ic) {
            const double* xc = xp + static_cast<std::size_t>(ic) * d.H * d.W;
            const double* wc = wp + ((static_cast<std::size_t>(oc) * d.IC + ic) * d.KH) * d.KW;
            for (int ky = 0; ky < d.KH; ++ky) {
                for (int kx = 0; kx < d.KW; ++kx) {
                    const double wv = wc[ky * d.KW + kx];
                    const int ix0 = kx - pad;
                    int lo, hi;
                    ox_range(ix0, stride, d.W, d.OW, lo, hi);
                    for (int oy = 0; oy < d.OH; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= d.H) continue;
                        const double* xrow = xc + static_cast<std::size_t>(iy) * d.W + ix0;
                        double* orow = outc + static_cast<std::size_t>(oy) * d.OW;
                        if (stride == 1) {
                            for (int ox = lo; ox <= hi; ++ox) orow[ox] += wv * xrow[ox];
                        } else {
                            for (int ox = lo; ox <= hi; ++ox) orow[ox] += wv * xrow[ox * stride];
                        }
                    }
                }
            }
        }
    }
}

void conv2d_backward_input(Tensor& gx, const Tensor& gout, const Tensor& w, int stride, int pad) {
    if (gx.ndim() != 3 || w.ndim() != 4) throw ShapeMismatch("conv2d_backward_input: bad shapes");
    const int C = gx.dim(0), H = gx.dim(1), W = gx.dim(2);
    const int OC = w.dim(0), KH = w.dim(2), KW = w.dim(3);
    const int OH = gout.dim(1), OW = gout.dim(2);
    const double* gp = gout.data();
    const double* wp = w.data();
    double* gxp = gx.data();

#pragma omp parallel for schedule(static)
    for (int ic = 0; ic < C; ++ic) {
        double* gxc = gxp + static_cast<std::size_t>(ic) * H * W;
        for (int oc = 0; oc < OC; ++oc) {
            const double* gc = gp + static_cast<std::size_t>(oc) * OH * OW;
            const double* wc = wp + ((static_cast<std::size_t>(oc) * C + ic) * KH) * KW;
            for (int ky = 0; ky < KH; ++ky) {
                for (int kx = 0; kx < KW; ++kx) {
                    const double wv = wc[ky * KW + kx];
                    const int ix0 = kx - pad;
                    int lo, hi;
                    ox_range(ix0, stride, W, OW, lo, hi);
                    for (int oy = 0; oy < OH; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= H) continue;
                        double* grow = gxc + static_cast<std::size_t>(iy) * W + ix0;
                        const double* gorow = gc + static_cast<std::size_t>(oy) * OW;
                        for (int ox = lo; ox <= hi; ++ox) grow[ox * stride] += wv * gorow[ox];
                    }
                }
            }
        }
    }
}

void conv2d_backward_weight(Tensor& gw, Tensor* gbias, const Tensor& gout, const Tensor& x,
                            int stride, int pad) {
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int OC = gw.dim(0), KH = gw.dim(2), KW = gw.dim(3);
    const int OH = gout.dim(1), OW = gout.dim(2);
    const double* xp = x.data();
    const double* gp = gout.data();
    double* gwp = gw.data();

#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < OC; ++oc) {
        const double* gc = gp + static_cast<std::size_t>(oc) * OH * OW;
        if (gbias) {
            double acc = 0.0;
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(OH) * OW; ++i) acc += gc[i];
            (*gbias)[oc] += acc;
        }
        for (int ic = 0; ic < C; ++ic) {
            const double* xc = xp + static_cast<std::size_t>(ic) * H * W;
            double* gwc = gwp + ((static_cast<std::size_t>(oc) * C + ic) * KH) * KW;
            for (int ky = 0; ky < KH; ++ky) {
                for (int kx = 0; kx < KW; ++kx) {
                    const int ix0 = kx - pad;
                    int lo, hi;
                    ox_range(ix0, stride, W, OW, lo, hi);
                    double acc = 0.0;
                    for (int oy = 0; oy < OH; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= H) continue;
                        const double* xrow = xc + static_cast<std::size_t>(iy) * W + ix0;
                        const double* gorow = gc + static_cast<std::size_t>(oy) * OW;
                        if (stride == 1) {
                            for (int ox = lo; ox <= hi; ++ox) acc += xrow[ox] * gorow[ox];
                        } else {
                            for (int ox = lo; ox <= hi; ++ox) acc += xrow[ox * stride] * gorow[ox];
                        }
                    }
                    gwc[ky * KW + kx] += acc;
                }
            }
        }
    }
}

void conv3d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad) {
    const Conv3dDims d = conv3d_dims(x, w, stride, pad);
    out = Tensor({d.OC, d.D, d.OH, d.OW});
    const double* xp = x.data();
    const double* wp = w.data();
    double* op = out.data();

#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < d.OC; ++oc) {
        double* outc = op + static_cast<std::size_t>(oc) * d.D * d.OH * d.OW;
        const double b = bias ? (*bias)[oc] : 0.0;
        std::fill(outc, outc + static_cast<std::size_t>(d.D) * d.OH * d.OW, b);
        for (int ic = 0; ic < d.IC; ++ic) {
            for (int kd = 0; kd < 3; ++kd) {
                const double* wplane =
                    wp + (((static_cast<std::size_t>(oc) * d.IC + ic) * 3 + kd) * d.KH) * d.KW;
                for (int ky = 0; ky < d.KH; ++ky) {
                    for (int kx = 0; kx < d.KW; ++kx) {
                        const double wv = wplane[ky * d.KW + kx];
                        const int ix0 = kx - pad;
                        int lo, hi;
                        ox_range(ix0, stride, d.W, d.OW, lo, hi);
                        for (int od = 0; od < d.D; ++od) {
                            const int id = od + kd - 1;
                            if (id < 0 || id >= d.D) continue;
                            const double* xplane =
                                xp + (static_cast<std::size_t>(ic) * d.D + id) * d.H * d.W;
                            double* oplane = outc + static_cast<std::size_t>(od) * d.OH * d.OW;
                            for (int oy = 0; oy < d.OH; ++oy) {
                                const int iy = oy * stride - pad + ky;
                                if (iy < 0 || iy >= d.H) continue;
                                const double* xrow = xplane + static_cast<std::size_t>(iy) * d.W + ix0;
                                double* orow = oplane + static_cast<std::size_t>(oy) * d.OW;
                                for (int ox = lo; ox <= hi; ++ox) orow[ox] += wv * xrow[ox * stride];
                            }
                        }
                    }
                }
            }
        }
    }
}

void conv3d_backward_input(Tensor& gx, const Tensor& gout, const Tensor& w, int stride, int pad) {
    const int C = gx.dim(0), D = gx.dim(1), H = gx.dim(2), W = gx.dim(3);
    const int OC = w.dim(0), KH = w.dim(3), KW = w.dim(4);
    const int OH = gout.dim(2), OW = gout.dim(3);
    const double* gp = gout.data();
    const double* wp = w.data();
    double* gxp = gx.data();

#pragma omp parallel for schedule(static)
    for (int ic = 0; ic < C; ++ic) {
        for (int oc = 0; oc < OC; ++oc) {
            for (int kd = 0; kd < 3; ++kd) {
                const double* wplane =
                    wp + (((static_cast<std::size_t>(oc) * C + ic) * 3 + kd) * KH) * KW;
                for (int ky = 0; ky < KH; ++ky) {
                    for (int kx = 0; kx < KW; ++kx) {
                        const double wv = wplane[ky * KW + kx];
                        const int ix0 = kx - pad;
                        int lo, hi;
                        ox_range(ix0, stride, W, OW, lo, hi);
                        for (int od = 0; od < D; ++od) {
                            const int id = od + kd - 1;
                            if (id < 0 || id >= D) continue;
                            double* gxplane = gxp + (static_cast<std::size_t>(ic) * D + id) * H * W;
                            const double* goplane = gp + (static_cast<std::size_t>(oc) * D + od) * OH * OW;
                            for (int oy = 0; oy < OH; ++oy) {
                                const int iy = oy * stride - pad + ky;
                                if (iy < 0 || iy >= H) continue;
                                double* grow = gxplane + static_cast<std::size_t>(iy) * W + ix0;
                                const double* gorow = goplane + static_cast<std::size_t>(oy) * OW;
                                for (int ox = lo; ox <= hi; ++ox) grow[ox * stride] += wv * gorow[ox];
                            }
                        }
                    }
                }
            }
        }
    }
}

void conv3d_backward_weight(Tensor& gw, Tensor* gbias, const Tensor& gout, const Tensor& x,
                            int stride, int pad) {
    const int C = x.dim(0), D = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int OC = gw.dim(0), KH = gw.dim(3), KW = gw.dim(4);
    const int OH = gout.dim(2), OW = gout.dim(3);
    const double* xp = x.data();
    const double* gp = gout.data();
    double* gwp = gw.data();

#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < OC; ++oc) {
        const double* gc = gp + static_cast<std::size_t>(oc) * D * OH * OW;
        if (gbias) {
            double acc = 0.0;
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(D) * OH * OW; ++i) acc += gc[i];
            (*gbias)[oc] += acc;
        }
        for (int ic = 0; ic < C; ++ic) {
            for (int kd = 0; kd < 3; ++kd) {
                double* gwplane = gwp + (((static_cast<std::size_t>(oc) * C + ic) * 3 + kd) * KH) * KW;
                for (int ky = 0; ky < KH; ++ky) {
                    for (int kx = 0; kx < KW; ++kx) {
                        const int ix0 = kx - pad;
                        int lo, hi;
                        ox_range(ix0, stride, W, OW, lo, hi);
                        double acc = 0.0;
                        for (int od = 0; od < D; ++od) {
                            const int id = od + kd - 1;
                            if (id < 0 || id >= D) continue;
                            const double* xplane = xp + (static_cast<std::size_t>(ic) * D + id) * H * W;
                            const double* goplane = gc + static_cast<std::size_t>(od) * OH * OW;
                            for (int oy = 0; oy < OH; ++oy) {
                                const int iy = oy * stride - pad + ky;
                                if (iy < 0 || iy >= H) continue;
                                const double* xrow = xplane + static_cast<std::size_t>(iy) * W + ix0;
                                const double* gorow = goplane + static_cast<std::size_t>(oy) * OW;
                                for (int ox = lo; ox <= hi; ++ox) acc += xrow[ox * stride] * gorow[ox];
                            }
                        }
                        gwplane[ky * KW + kx] += acc;
                    }
                }
            }
        }
    }
}

void group_norm_forward(Tensor& out, Tensor& mean, Tensor& inv_std, const Tensor& x,
                        const Tensor& gamma, const Tensor& beta, int groups, double eps) {
    const std::int64_t n = x.numel();
    if (groups <= 0 || n % groups != 0) throw ShapeMismatch("group_norm: groups must divide numel");
    const std::int64_t m = n / groups;
    const int per_channel = groups / static_cast<int>(gamma.numel());
    if (per_channel <= 0 || groups % gamma.numel() != 0)
        throw ShapeMismatch("group_norm: gamma size must divide groups");
    out = Tensor(x.shape());
    mean = Tensor({groups});
    inv_std = Tensor({groups});
    const double* xp = x.data();
    double* op = out.data();

#pragma omp parallel for schedule(static)
    for (int g = 0; g < groups; ++g) {
        const double* xg = xp + static_cast<std::size_t>(g) * m;
        double* og = op + static_cast<std::size_t>(g) * m;
        double mu = 0.0;
        for (std::int64_t i = 0; i < m; ++i) mu += xg[i];
        mu /= static_cast<double>(m);
        double var = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            const double dlt = xg[i] - mu;
            var += dlt * dlt;
        }
        var /= static_cast<double>(m);
        const double is = 1.0 / std::sqrt(var + eps);
        const int c = g / per_channel;
        const double gm = gamma[c], bt = beta[c];
        for (std::int64_t i = 0; i < m; ++i) og[i] = gm * (xg[i] - mu) * is + bt;
        mean[g] = mu;
        inv_std[g] = is;
    }
}

void group_norm_backward(Tensor& gx, Tensor& ggamma, Tensor& gbeta, const Tensor& gout,
                         const Tensor& x, const Tensor& mean, const Tensor& inv_std,
                         const Tensor& gamma, int groups) {
    const std::int64_t m = x.numel() / groups;
    const int per_channel = groups / static_cast<int>(gamma.numel());
    const double* xp = x.data();
    const double* gp = gout.data();
    double* gxp = gx.data();

    // Channel reductions first (ggamma/gbeta span several groups per channel).
    for (int g = 0; g < groups; ++g) {
        const double* xg = xp + static_cast<std::size_t>(g) * m;
        const double* gg = gp + static_cast<std::size_t>(g) * m;
        const double mu = mean[g], is = inv_std[g];
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            sum_g += gg[i];
            sum_gx += gg[i] * (xg[i] - mu) * is;
        }
        const int c = g / per_channel;
        gbeta[c] += sum_g;
        ggamma[c] += sum_gx;
    }

#pragma omp parallel for schedule(static)
    for (int g = 0; g < groups; ++g) {
        const double* xg = xp + static_cast<std::size_t>(g) * m;
        const double* gg = gp + static_cast<std::size_t>(g) * m;
        double* gxg = gxp + static_cast<std::size_t>(g) * m;
        const double mu = mean[g], is = inv_std[g];
        const double gm = gamma[g / per_channel];
        double sum_g = 0.0, sum_gxhat = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            const double xh = (xg[i] - mu) * is;
            sum_g += gg[i];
            sum_gxhat += gg[i] * xh;
        }
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::int64_t i = 0; i < m; ++i) {
            const double xh = (xg[i] - mu) * is;
            gxg[i] += gm * is * (gg[i] - sum_g * inv_m - xh * sum_gxhat * inv_m);
        }
    }
}

void upsample2x_forward(Tensor& out, const Tensor& x) {
    const int nd = x.ndim();
    if (nd < 2) throw ShapeMismatch("upsample2x: need at least 2 dims");
    const int H = x.dim(nd - 2), W = x.dim(nd - 1);
    std::vector<int> oshape = x.shape();
    oshape[static_cast<std::size_t>(nd - 2)] = 2 * H;
    oshape[static_cast<std::size_t>(nd - 1)] = 2 * W;
    out = Tensor(oshape);
    const std::int64_t planes = x.numel() / (static_cast<std::int64_t>(H) * W);
    const double* xp = x.data();
    double* op = out.data();

#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < planes; ++p) {
        const double* xpl = xp + p * H * W;
        double* opl = op + p * 4 * H * W;
        for (int y = 0; y < H; ++y) {
            for (int x2 = 0; x2 < W; ++x2) {
                const double v = xpl[static_cast<std::size_t>(y) * W + x2];
                double* o0 = opl + (static_cast<std::size_t>(2 * y) * 2 * W) + 2 * x2;
                o0[0] = v;
                o0[1] = v;
                o0[2 * W] = v;
                o0[2 * W + 1] = v;
            }
        }
    }
}

void upsample2x_backward(Tensor& gx, const Tensor& gout) {
    const int nd = gx.ndim();
    const int H = gx.dim(nd - 2), W = gx.dim(nd - 1);
    const std::int64_t planes = gx.numel() / (static_cast<std::int64_t>(H) * W);
    const double* gp = gout.data();
    double* gxp = gx.data();

#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < planes; ++p) {
        const double* gpl = gp + p * 4 * H * W;
        double* gxpl = gxp + p * H * W;
        for (int y = 0; y < H; ++y) {
            for (int x2 = 0; x2 < W; ++x2) {
                const double* g0 = gpl + (static_cast<std::size_t>(2 * y) * 2 * W) + 2 * x2;
                gxpl[static_cast<std::size_t>(y) * W + x2] += g0[0] + g0[1] + g0[2 * W] + g0[2 * W + 1];
            }
        }
    }
}

namespace ref {

void conv2d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad) {
    const Conv2dDims d = conv2d_dims(x, w, stride, pad);
    out = Tensor({d.OC, d.OH, d.OW});
    for (int oc = 0; oc < d.OC; ++oc)
        for (int oy = 0; oy < d.OH; ++oy)
            for (int ox = 0; ox < d.OW; ++ox) {
                double acc = bias ? (*bias)[oc] : 0.0;
                for (int ic = 0; ic < d.IC; ++ic)
                    for (int ky = 0; ky < d.KH; ++ky)
                        for (int kx = 0; kx < d.KW; ++kx) {
                            const int iy = oy * stride - pad + ky;
                            const int ix = ox * stride - pad + kx;
                            if (iy < 0 || iy >= d.H || ix < 0 || ix >= d.W) continue;
                            acc += w[((static_cast<std::int64_t>(oc) * d.IC + ic) * d.KH + ky) * d.KW + kx] *
                                   x[(static_cast<std::int64_t>(ic) * d.H + iy) * d.W + ix];
                        }
                out[(static_cast<std::int64_t>(oc) * d.OH + oy) * d.OW + ox] = acc;
            }
}

void conv2d_backward_input(Tensor& gx, const Tensor& gout, const Tensor& w, int stride, int pad) {
    const int C = gx.dim(0), H = gx.dim(1), W = gx.dim(2);
    const int OC = w.dim(0), KH = w.dim(2), KW = w.dim(3);
    const int OH = gout.dim(1), OW = gout.dim(2);
    for (int oc = 0; oc < OC; ++oc)
        for (int oy = 0; oy < OH; ++oy)
            for (int ox = 0; ox < OW; ++ox) {
                const double g = gout[(static_cast<std::int64_t>(oc) * OH + oy) * OW + ox];
                for (int ic = 0; ic < C; ++ic)
                    for (int ky = 0; ky < KH; ++ky)
                        for (int kx = 0; kx < KW; ++kx) {
                            const int iy = oy * stride - pad + ky;
                            const int ix = ox * stride - pad + kx;
                            if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                            gx[(static_cast<std::int64_t>(ic) * H + iy) * W + ix] +=
                                g * w[((static_cast<std::int64_t>(oc) * C + ic) * KH + ky) * KW + kx];
                        }
            }
}

void conv2d_backward_weight(Tensor& gw, Tensor* gbias, const Tensor& gout, const Tensor& x,
                            int stride, int pad) {
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int OC = gw.dim(0), KH = gw.dim(2), KW = gw.dim(3);
    const int OH = gout.dim(1), OW = gout.dim(2);
    for (int oc = 0; oc < OC; ++oc)
        for (int oy = 0; oy < OH; ++oy)
            for (int ox = 0; ox < OW; ++ox) {
                const double g = gout[(static_cast<std::int64_t>(oc) * OH + oy) * OW + ox];
                if (gbias) (*gbias)[oc] += g;
                for (int ic = 0; ic < C; ++ic)
                    for (int ky = 0; ky < KH; ++ky)
                        for (int kx = 0; kx < KW; ++kx) {
                            const int iy = oy * stride - pad + ky;
                            const int ix = ox * stride - pad + kx;
                            if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                            gw[((static_cast<std::int64_t>(oc) * C + ic) * KH + ky) * KW + kx] +=
                                g * x[(static_cast<std::int64_t>(ic) * H + iy) * W + ix];
                        }
            }
}

void conv3d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad) {
    const Conv3dDims d = conv3d_dims(x, w, stride, pad);
    out = Tensor({d.OC, d.D, d.OH, d.OW});
    for (int oc = 0; oc < d.OC; ++oc)
        for (int od = 0; od < d.D; ++od)
            for (int oy = 0; oy < d.OH; ++oy)
                for (int ox = 0; ox < d.OW; ++ox) {
                    double acc = bias ? (*bias)[oc] : 0.0;
                    for (int ic = 0; ic < d.IC; ++ic)
                        for (int kd = 0; kd < 3; ++kd)
                            for (int ky = 0; ky < d.KH; ++ky)
                                for (int kx = 0; kx < d.KW; ++kx) {
                                    const int id = od + kd - 1;
                                    const int iy = oy * stride - pad + ky;
                                    const int ix = ox * stride - pad + kx;
                                    if (id < 0 || id >= d.D || iy < 0 || iy >= d.H || ix < 0 || ix >= d.W)
                                        continue;
                                    acc += w[(((static_cast<std::int64_t>(oc) * d.IC + ic) * 3 + kd) * d.KH + ky) *
                                                 d.KW +
                                             kx] *
                                           x[((static_cast<std::int64_t>(ic) * d.D + id) * d.H + iy) * d.W + ix];
                                }
                    out[((static_cast<std::int64_t>(oc) * d.D + od) * d.OH + oy) * d.OW + ox] = acc;
                }
}

void group_norm_forward(Tensor& out, Tensor& mean, Tensor& inv_std, const Tensor& x,
                        const Tensor& gamma, const Tensor& beta, int groups, double eps) {
    const std::int64_t m = x.numel() / groups;
    const int per_channel = groups / static_cast<int>(gamma.numel());
    out = Tensor(x.shape());
    mean = Tensor({groups});
    inv_std = Tensor({groups});
    for (int g = 0; g < groups; ++g) {
        double mu = 0.0;
        for (std::int64_t i = 0; i < m; ++i) mu += x[g * m + i];
        mu /= static_cast<double>(m);
        double var = 0.0;
        for (std::int64_t i = 0; i < m; ++i) var += (x[g * m + i] - mu) * (x[g * m + i] - mu);
        var /= static_cast<double>(m);
        const double is = 1.0 / std::sqrt(var + eps);
        for (std::int64_t i = 0; i < m; ++i)
            out[g * m + i] = gamma[g / per_channel] * (x[g * m + i] - mu) * is + beta[g / per_channel];
        mean[g] = mu;
        inv_std[g] = is;
    }
}

void upsample2x_forward(Tensor& out, const Tensor& x) {
    const int nd = x.ndim();
    const int H = x.dim(nd - 2), W = x.dim(nd - 1);
    std::vector<int> oshape = x.shape();
    oshape[static_cast<std::size_t>(nd - 2)] = 2 * H;
    oshape[static_cast<std::size_t>(nd - 1)] = 2 * W;
    out = Tensor(oshape);
    const std::int64_t planes = x.numel() / (static_cast<std::int64_t>(H) * W);
    for (std::int64_t p = 0; p < planes; ++p)
        for (int y = 0; y < 2 * H; ++y)
            for (int x2 = 0; x2 < 2 * W; ++x2)
                out[(p * 2 * H + y) * 2 * W + x2] = x[(p * H + y / 2) * W + x2 / 2];
}

} // namespace ref

} // namespace ldct::kern

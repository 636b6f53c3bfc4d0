#include "ldct/autograd.hpp"

#include <cmath>
#include <unordered_set>

#include "ldct/kernels.hpp"

namespace ldct::ag {

namespace {

Var make_node(Tensor value, std::vector<Var> parents) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->parents = std::move(parents);
    for (const auto& p : n->parents)
        if (p->requires_grad) n->requires_grad = true;
    return n;
}

Var pointwise(const Var& x, double (*f)(double), double (*df)(double, double)) {
    Tensor out(x->value.shape());
    const std::int64_t n = out.numel();
    for (std::int64_t i = 0; i < n; ++i) out[i] = f(x->value[i]);
    auto node = make_node(std::move(out), {x});
    if (node->requires_grad) {
        node->backward_fn = [df](Node& self) {
            Var& x2 = self.parents[0];
            if (!x2->requires_grad) return;
            Tensor& gx = x2->ensure_grad();
            for (std::int64_t i = 0; i < self.value.numel(); ++i)
                gx[i] += self.grad[i] * df(x2->value[i], self.value[i]);
        };
    }
    return node;
}

} // namespace

Var constant(Tensor v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    return n;
}

Var parameter(Tensor v, std::string name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->requires_grad = true;
    n->name = std::move(name);
    return n;
}

Var detach(const Var& x) { return constant(x->value); }

Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad) {
    Tensor out;
    kern::conv2d_forward(out, x->value, w->value, bias ? &bias->value : nullptr, stride, pad);
    std::vector<Var> parents{x, w};
    if (bias) parents.push_back(bias);
    auto node = make_node(std::move(out), std::move(parents));
    if (node->requires_grad) {
        node->backward_fn = [stride, pad, has_bias = bias != nullptr](Node& self) {
            Var& x2 = self.parents[0];
            Var& w2 = self.parents[1];
            if (x2->requires_grad)
                kern::conv2d_backward_input(x2->ensure_grad(), self.grad, w2->value, stride, pad);
            if (w2->requires_grad) {
                Tensor* gb = nullptr;
                if (has_bias && self.parents[2]->requires_grad) gb = &self.parents[2]->ensure_grad();
                kern::conv2d_backward_weight(w2->ensure_grad(), gb, self.grad, x2->value, stride, pad);
            }
        };
    }
    return node;
}

Var conv3d(const Var& x, const Var& w, const Var& bias, int stride, int pad) {
    Tensor out;
    kern::conv3d_forward(out, x->value, w->value, bias ? &bias->value : nullptr, stride, pad);
    std::vector<Var> parents{x, w};
    if (bias) parents.push_back(bias);
    auto node = make_node(std::move(out), std::move(parents));
    if (node->requires_grad) {
        node->backward_fn = [stride, pad, has_bias = bias != nullptr](Node& self) {
            Var& x2 = self.parents[0];
            Var& w2 = self.parents[1];
            if (x2->requires_grad)
                kern::conv3d_backward_input(x2->ensure_grad(), self.grad, w2->value, stride, pad);
            if (w2->requires_grad) {
                Tensor* gb = nullptr;
                if (has_bias && self.parents[2]->requires_grad) gb = &self.parents[2]->ensure_grad();
                kern::conv3d_backward_weight(w2->ensure_grad(), gb, self.grad, x2->value, stride, pad);
            }
        };
    }
    return node;
}

Var group_norm(const Var& x, const Var& gamma, const Var& beta, int groups, double eps) {
    Tensor out, mean, inv_std;
    kern::group_norm_forward(out, mean, inv_std, x->value, gamma->value, beta->value, groups, eps);
    auto node = make_node(std::move(out), {x, gamma, beta});
    if (node->requires_grad) {
        node->backward_fn = [groups, mean = std::move(mean), inv_std = std::move(inv_std)](Node& self) {
            Var& x2 = self.parents[0];
            Var& gm = self.parents[1];
            Var& bt = self.parents[2];
            Tensor& gx = x2->ensure_grad();
            Tensor& gg = gm->ensure_grad();
            Tensor& gb = bt->ensure_grad();
            kern::group_norm_backward(gx, gg, gb, self.grad, x2->value, mean, inv_std, gm->value, groups);
        };
    }
    return node;
}

Var fixed_norm(const Var& x, const Tensor& mean, const Tensor& var, const Var& gamma,
               const Var& beta, double eps) {
    const int C = static_cast<int>(mean.numel());
    const std::int64_t m = x->value.numel() / C;
    Tensor out(x->value.shape());
    std::vector<double> scale_c(static_cast<std::size_t>(C)), shift_c(static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) {
        const double s = gamma->value[c] / std::sqrt(var[c] + eps);
        scale_c[static_cast<std::size_t>(c)] = s;
        shift_c[static_cast<std::size_t>(c)] = beta->value[c] - s * mean[c];
    }
    for (int c = 0; c < C; ++c)
        for (std::int64_t i = 0; i < m; ++i)
            out[c * m + i] = scale_c[static_cast<std::size_t>(c)] * x->value[c * m + i] +
                             shift_c[static_cast<std::size_t>(c)];
    auto node = make_node(std::move(out), {x, gamma, beta});
    if (node->requires_grad) {
        node->backward_fn = [scale_c = std::move(scale_c), m, C](Node& self) {
            Var& x2 = self.parents[0];
            if (x2->requires_grad) {
                Tensor& gx = x2->ensure_grad();
                for (int c = 0; c < C; ++c)
                    for (std::int64_t i = 0; i < m; ++i)
                        gx[c * m + i] += self.grad[c * m + i] * scale_c[static_cast<std::size_t>(c)];
            }
            // gamma/beta grads through eval-mode norm are not needed anywhere.
        };
    }
    return node;
}

Var relu(const Var& x) {
    return pointwise(
        x, [](double v) { return v > 0.0 ? v : 0.0; },
        [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& x, double slope) {
    Tensor out(x->value.shape());
    for (std::int64_t i = 0; i < out.numel(); ++i) {
        const double v = x->value[i];
        out[i] = v > 0.0 ? v : slope * v;
    }
    auto node = make_node(std::move(out), {x});
    if (node->requires_grad) {
        node->backward_fn = [slope](Node& self) {
            Var& x2 = self.parents[0];
            if (!x2->requires_grad) return;
            Tensor& gx = x2->ensure_grad();
            for (std::int64_t i = 0; i < self.value.numel(); ++i)
                gx[i] += self.grad[i] * (x2->value[i] > 0.0 ? 1.0 : slope);
        };
    }
    return node;
}

Var tanh_op(const Var& x) {
    return pointwise(
        x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid_op(const Var& x) {
    return pointwise(
        x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
        [](double, double y) { return y * (1.0 - y); });
}

Var softplus(const Var& x) {
    // log(1 + e^v), computed stably for large |v|.
    return pointwise(
        x,
        [](double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); },
        [](double v, double) { return 1.0 / (1.0 + std::exp(-v)); });
}

Var add(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) throw ShapeMismatch("add: shapes differ");
    Tensor out(a->value.shape());
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] + b->value[i];
    auto node = make_node(std::move(out), {a, b});
    if (node->requires_grad) {
        node->backward_fn = [](Node& self) {
            for (int k = 0; k < 2; ++k) {
                Var& p = self.parents[static_cast<std::size_t>(k)];
                if (!p->requires_grad) continue;
                Tensor& g = p->ensure_grad();
                for (std::int64_t i = 0; i < self.value.numel(); ++i) g[i] += self.grad[i];
            }
        };
    }
    return node;
}

Var sub(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) throw ShapeMismatch("sub: shapes differ");
    Tensor out(a->value.shape());
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] - b->value[i];
    auto node = make_node(std::move(out), {a, b});
    if (node->requires_grad) {
        node->backward_fn = [](Node& self) {
            Var& a2 = self.parents[0];
            Var& b2 = self.parents[1];
            if (a2->requires_grad) {
                Tensor& g = a2->ensure_grad();
                for (std::int64_t i = 0; i < self.value.numel(); ++i) g[i] += self.grad[i];
            }
            if (b2->requires_grad) {
                Tensor& g = b2->ensure_grad();
                for (std::int64_t i = 0; i < self.value.numel(); ++i) g[i] -= self.grad[i];
            }
        };
    }
    return node;
}

Var scale(const Var& a, double s) {
    Tensor out(a->value.shape());
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = s * a->value[i];
    auto node = make_node(std::move(out), {a});
    if (node->requires_grad) {
        node->backward_fn = [s](Node& self) {
            Var& a2 = self.parents[0];
            if (!a2->requires_grad) return;
            Tensor& g = a2->ensure_grad();
            for (std::int64_t i = 0; i < self.value.numel(); ++i) g[i] += s * self.grad[i];
        };
    }
    return node;
}

Var add_scalar(const Var& a, double s) {
    Tensor out(a->value.shape());
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] + s;
    auto node = make_node(std::move(out), {a});
    if (node->requires_grad) {
        node->backward_fn = [](Node& self) {
            Var& a2 = self.parents[0];
            if (!a2->requires_grad) return;
            Tensor& g = a2->ensure_grad();
            for (std::int64_t i = 0; i < self.value.numel(); ++i) g[i] += self.grad[i];
        };
    }
    return node;
}

Var square(const Var& a) {
    return pointwise(
        a, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Var abs_op(const Var& a) {
    // Subgradient 0 at the kink.
    return pointwise(
        a, [](double v) { return std::fabs(v); },
        [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Var mean_all(const Var& a) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < a->value.numel(); ++i) acc += a->value[i];
    const double inv_n = 1.0 / static_cast<double>(a->value.numel());
    Tensor out({1});
    out[0] = acc * inv_n;
    auto node = make_node(std::move(out), {a});
    if (node->requires_grad) {
        node->backward_fn = [inv_n](Node& self) {
            Var& a2 = self.parents[0];
            if (!a2->requires_grad) return;
            Tensor& g = a2->ensure_grad();
            const double gv = self.grad[0] * inv_n;
            for (std::int64_t i = 0; i < g.numel(); ++i) g[i] += gv;
        };
    }
    return node;
}

Var gate_mul(const Var& gate, const Var& x) {
    if (gate->value.dim(0) != 1 || gate->value.numel() * x->value.dim(0) != x->value.numel())
        throw ShapeMismatch("gate_mul: gate must be {1,...} matching x's trailing dims");
    const int C = x->value.dim(0);
    const std::int64_t m = gate->value.numel();
    Tensor out(x->value.shape());
    for (int c = 0; c < C; ++c)
        for (std::int64_t i = 0; i < m; ++i) out[c * m + i] = gate->value[i] * x->value[c * m + i];
    auto node = make_node(std::move(out), {gate, x});
    if (node->requires_grad) {
        node->backward_fn = [C, m](Node& self) {
            Var& g2 = self.parents[0];
            Var& x2 = self.parents[1];
            if (g2->requires_grad) {
                Tensor& gg = g2->ensure_grad();
                for (int c = 0; c < C; ++c)
                    for (std::int64_t i = 0; i < m; ++i) gg[i] += self.grad[c * m + i] * x2->value[c * m + i];
            }
            if (x2->requires_grad) {
                Tensor& gx = x2->ensure_grad();
                for (int c = 0; c < C; ++c)
                    for (std::int64_t i = 0; i < m; ++i) gx[c * m + i] += self.grad[c * m + i] * g2->value[i];
            }
        };
    }
    return node;
}

Var concat_ch(const Var& a, const Var& b) {
    if (a->value.ndim() != b->value.ndim()) throw ShapeMismatch("concat_ch: rank differs");
    for (int i = 1; i < a->value.ndim(); ++i)
        if (a->value.dim(i) != b->value.dim(i)) throw ShapeMismatch("concat_ch: trailing dims differ");
    std::vector<int> oshape = a->value.shape();
    oshape[0] += b->value.dim(0);
    Tensor out(oshape);
    const std::int64_t na = a->value.numel(), nb = b->value.numel();
    for (std::int64_t i = 0; i < na; ++i) out[i] = a->value[i];
    for (std::int64_t i = 0; i < nb; ++i) out[na + i] = b->value[i];
    auto node = make_node(std::move(out), {a, b});
    if (node->requires_grad) {
        node->backward_fn = [na, nb](Node& self) {
            Var& a2 = self.parents[0];
            Var& b2 = self.parents[1];
            if (a2->requires_grad) {
                Tensor& g = a2->ensure_grad();
                for (std::int64_t i = 0; i < na; ++i) g[i] += self.grad[i];
            }
            if (b2->requires_grad) {
                Tensor& g = b2->ensure_grad();
                for (std::int64_t i = 0; i < nb; ++i) g[i] += self.grad[na + i];
            }
        };
    }
    return node;
}

Var upsample2x(const Var& x) {
    Tensor out;
    kern::upsample2x_forward(out, x->value);
    auto node = make_node(std::move(out), {x});
    if (node->requires_grad) {
        node->backward_fn = [](Node& self) {
            Var& x2 = self.parents[0];
            if (!x2->requires_grad) return;
            kern::upsample2x_backward(x2->ensure_grad(), self.grad);
        };
    }
    return node;
}

Var center_depth(const Var& x) {
    if (x->value.ndim() != 4 || x->value.dim(1) != 3)
        throw ShapeMismatch("center_depth: expected {C,3,H,W}");
    const int C = x->value.dim(0), H = x->value.dim(2), W = x->value.dim(3);
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    Tensor out({C, H, W});
    for (int c = 0; c < C; ++c)
        for (std::int64_t i = 0; i < plane; ++i) out[c * plane + i] = x->value[(c * 3 + 1) * plane + i];
    auto node = make_node(std::move(out), {x});
    if (node->requires_grad) {
        node->backward_fn = [C, plane](Node& self) {
            Var& x2 = self.parents[0];
            if (!x2->requires_grad) return;
            Tensor& g = x2->ensure_grad();
            for (int c = 0; c < C; ++c)
                for (std::int64_t i = 0; i < plane; ++i) g[(c * 3 + 1) * plane + i] += self.grad[c * plane + i];
        };
    }
    return node;
}

Var replicate_depth3(const Var& x) {
    if (x->value.ndim() != 3) throw ShapeMismatch("replicate_depth3: expected {C,H,W}");
    const int C = x->value.dim(0), H = x->value.dim(1), W = x->value.dim(2);
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    Tensor out({C, 3, H, W});
    for (int c = 0; c < C; ++c)
        for (int d = 0; d < 3; ++d)
            for (std::int64_t i = 0; i < plane; ++i) out[(c * 3 + d) * plane + i] = x->value[c * plane + i];
    auto node = make_node(std::move(out), {x});
    if (node->requires_grad) {
        node->backward_fn = [C, plane](Node& self) {
            Var& x2 = self.parents[0];
            if (!x2->requires_grad) return;
            Tensor& g = x2->ensure_grad();
            for (int c = 0; c < C; ++c)
                for (int d = 0; d < 3; ++d)
                    for (std::int64_t i = 0; i < plane; ++i)
                        g[c * plane + i] += self.grad[(c * 3 + d) * plane + i];
        };
    }
    return node;
}

void backward(const Var& root) {
    if (root->value.numel() != 1) throw ShapeMismatch("backward: root must be scalar");
    if (!root->requires_grad) return;

    // Iterative post-order DFS over grad-requiring nodes.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.get(), 0);
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Node* p = node->parents[idx].get();
            ++idx;
            if (p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && n->grad_ready) n->backward_fn(*n);
    }
}

} // namespace ldct::ag

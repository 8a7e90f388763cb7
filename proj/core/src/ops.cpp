// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siamcut/errors.hpp"

namespace siamcut::ad {

std::size_t conv_output_size(std::size_t n, std::size_t k, std::size_t stride, Padding padding) {
    if (stride == 0) throw ShapeError("stride must be >= 1");
    if (k == 0) throw ShapeError("kernel size must be >= 1");
    if (padding == Padding::Same) return (n + stride - 1) / stride;
    if (n < k) throw ShapeError("valid window of size " + std::to_string(k) + " does not fit extent " +
                                std::to_string(n));
    return (n - k) / stride + 1;
}

std::size_t conv_pad_before(std::size_t n, std::size_t k, std::size_t stride, Padding padding) {
    if (padding == Padding::Valid) return 0;
    const std::size_t out = conv_output_size(n, k, stride, padding);
    const std::size_t span = (out - 1) * stride + k;
    return span > n ? (span - n) / 2 : 0;
}

namespace {

struct Geometry {
    std::size_t in_h, in_w, out_h, out_w, k, stride, pad_t, pad_l;

    Geometry(std::size_t h, std::size_t w, std::size_t kernel, std::size_t s, Padding p)
        : in_h(h), in_w(w), out_h(conv_output_size(h, kernel, s, p)), out_w(conv_output_size(w, kernel, s, p)),
          k(kernel), stride(s), pad_t(conv_pad_before(h, kernel, s, p)), pad_l(conv_pad_before(w, kernel, s, p)) {}
};

// Output indices o with 0 <= o*s + kk - pad < n, as a half-open range.
std::pair<std::size_t, std::size_t> valid_outputs(std::size_t kk, std::size_t pad, std::size_t s, std::size_t n,
                                                  std::size_t out) {
    const std::size_t lo = pad > kk ? (pad - kk + s - 1) / s : 0;
    const std::size_t hi = (n - 1 + pad >= kk) ? std::min(out, (n - 1 + pad - kk) / s + 1) : 0;
    return {lo, std::max(lo, hi)};
}

void require_rank(const Shape& s, std::size_t rank, const char* op, const char* what) {
    if (s.size() != rank)
        throw ShapeError(std::string(op) + ": " + what + " must have rank " + std::to_string(rank) + ", got " +
                         shape_string(s));
}

void require_same(const Shape& a, const Shape& b, const char* op) {
    if (a != b) throw ShapeError(std::string(op) + ": shapes " + shape_string(a) + " and " + shape_string(b) +
                                 " differ");
}

void require_scalar(const Shape& s, const char* op) {
    if (numel(s) != 1) throw ShapeError(std::string(op) + ": expected a scalar, got " + shape_string(s));
}

// acc[i] += src[i]
template <typename T>
void accumulate(std::span<T> acc, std::span<const T> src) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
}

}  // namespace

template <typename T>
Var conv2d(Tape<T>& tape, Var x, Var w, std::optional<Var> b, std::size_t stride, Padding padding) {
    const Shape& xs = tape.shape(x);
    const Shape& ws = tape.shape(w);
    require_rank(xs, 3, "conv2d", "input");
    require_rank(ws, 4, "conv2d", "kernel");
    if (ws[1] != xs[0] || ws[2] != ws[3])
        throw ShapeError("conv2d: kernel " + shape_string(ws) + " incompatible with input " + shape_string(xs));
    const std::size_t co_n = ws[0], ci_n = ws[1];
    if (b && numel(tape.shape(*b)) != co_n) throw ShapeError("conv2d: bias size must equal output channels");
    const Geometry g(xs[1], xs[2], ws[2], stride, padding);
    const std::size_t in_plane = g.in_h * g.in_w, out_plane = g.out_h * g.out_w, k = g.k;

    std::vector<T> out(co_n * out_plane, T(0));
    {
        auto xv = tape.value(x);
        auto wv = tape.value(w);
        for (std::size_t co = 0; co < co_n; ++co) {
            T* o = out.data() + co * out_plane;
            if (b) std::fill(o, o + out_plane, tape.value(*b)[co]);
            for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const T* xp = xv.data() + ci * in_plane;
                for (std::size_t ky = 0; ky < k; ++ky) {
                    const auto [oy0, oy1] = valid_outputs(ky, g.pad_t, stride, g.in_h, g.out_h);
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const auto [ox0, ox1] = valid_outputs(kx, g.pad_l, stride, g.in_w, g.out_w);
                        const T wk = wv[((co * ci_n + ci) * k + ky) * k + kx];
                        for (std::size_t oy = oy0; oy < oy1; ++oy) {
                            const T* xr = xp + (oy * stride + ky - g.pad_t) * g.in_w + kx - g.pad_l;
                            T* orow = o + oy * g.out_w;
                            for (std::size_t ox = ox0; ox < ox1; ++ox) orow[ox] += wk * xr[ox * stride];
                        }
                    }
                }
            }
        }
    }
    Shape shape{co_n, g.out_h, g.out_w};
    const Var inputs[] = {x, w, b.value_or(w)};
    return tape.record(std::move(shape), std::move(out), inputs, [=](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto xv = t.value(x);
        auto wv = t.value(w);
        const bool gx_on = t.requires_grad(x), gw_on = t.requires_grad(w);
        std::span<T> gx = gx_on ? t.grad(x) : std::span<T>{};
        std::span<T> gw = gw_on ? t.grad(w) : std::span<T>{};
        for (std::size_t co = 0; co < co_n; ++co) {
            const T* go = gout.data() + co * out_plane;
            for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const std::size_t xoff = ci * in_plane;
                for (std::size_t ky = 0; ky < k; ++ky) {
                    const auto [oy0, oy1] = valid_outputs(ky, g.pad_t, stride, g.in_h, g.out_h);
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const auto [ox0, ox1] = valid_outputs(kx, g.pad_l, stride, g.in_w, g.out_w);
                        const std::size_t widx = ((co * ci_n + ci) * k + ky) * k + kx;
                        const T wk = wv[widx];
                        T gwk = T(0);
                        for (std::size_t oy = oy0; oy < oy1; ++oy) {
                            const std::size_t row = xoff + (oy * stride + ky - g.pad_t) * g.in_w + kx - g.pad_l;
                            const T* grow = go + oy * g.out_w;
                            for (std::size_t ox = ox0; ox < ox1; ++ox) {
                                gwk += grow[ox] * xv[row + ox * stride];
                                if (gx_on) gx[row + ox * stride] += wk * grow[ox];
                            }
                        }
                        if (gw_on) gw[widx] += gwk;
                    }
                }
            }
        }
        if (b && t.requires_grad(*b)) {
            auto gb = t.grad(*b);
            for (std::size_t co = 0; co < co_n; ++co)
                for (std::size_t i = 0; i < out_plane; ++i) gb[co] += gout[co * out_plane + i];
        }
    });
}

template <typename T>
Var depthwise_conv2d(Tape<T>& tape, Var x, Var w, std::size_t stride, Padding padding) {
    const Shape& xs = tape.shape(x);
    const Shape& ws = tape.shape(w);
    require_rank(xs, 3, "depthwise_conv2d", "input");
    require_rank(ws, 3, "depthwise_conv2d", "kernel");
    if (ws[0] != xs[0] || ws[1] != ws[2])
        throw ShapeError("depthwise_conv2d: kernel " + shape_string(ws) + " incompatible with input " +
                         shape_string(xs));
    const std::size_t c_n = xs[0];
    const Geometry g(xs[1], xs[2], ws[1], stride, padding);
    const std::size_t in_plane = g.in_h * g.in_w, out_plane = g.out_h * g.out_w, k = g.k;

    std::vector<T> out(c_n * out_plane, T(0));
    {
        auto xv = tape.value(x);
        auto wv = tape.value(w);
        for (std::size_t c = 0; c < c_n; ++c) {
            const T* xp = xv.data() + c * in_plane;
            T* o = out.data() + c * out_plane;
            for (std::size_t ky = 0; ky < k; ++ky) {
                const auto [oy0, oy1] = valid_outputs(ky, g.pad_t, stride, g.in_h, g.out_h);
                for (std::size_t kx = 0; kx < k; ++kx) {
                    const auto [ox0, ox1] = valid_outputs(kx, g.pad_l, stride, g.in_w, g.out_w);
                    const T wk = wv[(c * k + ky) * k + kx];
                    for (std::size_t oy = oy0; oy < oy1; ++oy) {
                        const T* xr = xp + (oy * stride + ky - g.pad_t) * g.in_w + kx - g.pad_l;
                        T* orow = o + oy * g.out_w;
                        for (std::size_t ox = ox0; ox < ox1; ++ox) orow[ox] += wk * xr[ox * stride];
                    }
                }
            }
        }
    }
    Shape shape{c_n, g.out_h, g.out_w};
    return tape.record(std::move(shape), std::move(out), {x, w}, [=](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto xv = t.value(x);
        auto wv = t.value(w);
        const bool gx_on = t.requires_grad(x), gw_on = t.requires_grad(w);
        std::span<T> gx = gx_on ? t.grad(x) : std::span<T>{};
        std::span<T> gw = gw_on ? t.grad(w) : std::span<T>{};
        for (std::size_t c = 0; c < c_n; ++c) {
            const T* go = gout.data() + c * out_plane;
            for (std::size_t ky = 0; ky < k; ++ky) {
                const auto [oy0, oy1] = valid_outputs(ky, g.pad_t, stride, g.in_h, g.out_h);
                for (std::size_t kx = 0; kx < k; ++kx) {
                    const auto [ox0, ox1] = valid_outputs(kx, g.pad_l, stride, g.in_w, g.out_w);
                    const std::size_t widx = (c * k + ky) * k + kx;
                    const T wk = wv[widx];
                    T gwk = T(0);
                    for (std::size_t oy = oy0; oy < oy1; ++oy) {
                        const std::size_t row = c * in_plane + (oy * stride + ky - g.pad_t) * g.in_w + kx - g.pad_l;
                        const T* grow = go + oy * g.out_w;
                        for (std::size_t ox = ox0; ox < ox1; ++ox) {
                            gwk += grow[ox] * xv[row + ox * stride];
                            if (gx_on) gx[row + ox * stride] += wk * grow[ox];
                        }
                    }
                    if (gw_on) gw[widx] += gwk;
                }
            }
        }
    });
}

template <typename T>
Var pointwise_conv2d(Tape<T>& tape, Var x, Var w, std::optional<Var> b) {
    const Shape& xs = tape.shape(x);
    const Shape& ws = tape.shape(w);
    require_rank(xs, 3, "pointwise_conv2d", "input");
    require_rank(ws, 2, "pointwise_conv2d", "kernel");
    if (ws[1] != xs[0])
        throw ShapeError("pointwise_conv2d: kernel " + shape_string(ws) + " incompatible with input " +
                         shape_string(xs));
    const std::size_t co_n = ws[0], ci_n = ws[1], plane = xs[1] * xs[2];
    if (b && numel(tape.shape(*b)) != co_n) throw ShapeError("pointwise_conv2d: bias size must equal output channels");

    std::vector<T> out(co_n * plane, T(0));
    {
        auto xv = tape.value(x);
        auto wv = tape.value(w);
        for (std::size_t co = 0; co < co_n; ++co) {
            T* o = out.data() + co * plane;
            if (b) std::fill(o, o + plane, tape.value(*b)[co]);
            for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const T wk = wv[co * ci_n + ci];
                const T* xp = xv.data() + ci * plane;
                for (std::size_t p = 0; p < plane; ++p) o[p] += wk * xp[p];
            }
        }
    }
    Shape shape{co_n, xs[1], xs[2]};
    const Var inputs[] = {x, w, b.value_or(w)};
    return tape.record(std::move(shape), std::move(out), inputs, [=](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto xv = t.value(x);
        auto wv = t.value(w);
        const bool gx_on = t.requires_grad(x), gw_on = t.requires_grad(w);
        std::span<T> gx = gx_on ? t.grad(x) : std::span<T>{};
        std::span<T> gw = gw_on ? t.grad(w) : std::span<T>{};
        for (std::size_t co = 0; co < co_n; ++co) {
            const T* go = gout.data() + co * plane;
            for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const T* xp = xv.data() + ci * plane;
                if (gw_on) {
                    T acc = T(0);
                    for (std::size_t p = 0; p < plane; ++p) acc += go[p] * xp[p];
                    gw[co * ci_n + ci] += acc;
                }
                if (gx_on) {
                    const T wk = wv[co * ci_n + ci];
                    T* gxp = gx.data() + ci * plane;
                    for (std::size_t p = 0; p < plane; ++p) gxp[p] += wk * go[p];
                }
            }
        }
        if (b && t.requires_grad(*b)) {
            auto gb = t.grad(*b);
            for (std::size_t co = 0; co < co_n; ++co)
                for (std::size_t p = 0; p < plane; ++p) gb[co] += gout[co * plane + p];
        }
    });
}

template <typename T>
Var separable_conv2d(Tape<T>& tape, Var x, Var w_depth, Var w_point, std::optional<Var> b, std::size_t stride,
                     Padding padding) {
    return pointwise_conv2d(tape, depthwise_conv2d(tape, x, w_depth, stride, padding), w_point, b);
}

template <typename T>
Var max_pool(Tape<T>& tape, Var x, std::size_t kernel, std::size_t stride, Padding padding) {
    const Shape& xs = tape.shape(x);
    require_rank(xs, 3, "max_pool", "input");
    const std::size_t c_n = xs[0];
    const Geometry g(xs[1], xs[2], kernel, stride, padding);
    const std::size_t in_plane = g.in_h * g.in_w, out_plane = g.out_h * g.out_w;
    std::vector<T> out(c_n * out_plane);
    std::vector<std::size_t> argmax(out.size());
    auto xv = tape.value(x);
    for (std::size_t c = 0; c < c_n; ++c)
        for (std::size_t oy = 0; oy < g.out_h; ++oy)
            for (std::size_t ox = 0; ox < g.out_w; ++ox) {
                T best = -std::numeric_limits<T>::infinity();
                std::size_t best_i = 0;
                for (std::size_t ky = 0; ky < kernel; ++ky) {
                    const std::size_t iy = oy * stride + ky;
                    if (iy < g.pad_t || iy - g.pad_t >= g.in_h) continue;
                    for (std::size_t kx = 0; kx < kernel; ++kx) {
                        const std::size_t ix = ox * stride + kx;
                        if (ix < g.pad_l || ix - g.pad_l >= g.in_w) continue;
                        const std::size_t i = c * in_plane + (iy - g.pad_t) * g.in_w + (ix - g.pad_l);
                        if (xv[i] > best) {
                            best = xv[i];
                            best_i = i;
                        }
                    }
                }
                const std::size_t o = c * out_plane + oy * g.out_w + ox;
                out[o] = best;
                argmax[o] = best_i;
            }
    Shape shape{c_n, g.out_h, g.out_w};
    return tape.record(std::move(shape), std::move(out), {x},
                       [x, argmax = std::move(argmax)](Tape<T>& t, Var self) {
                           std::span<const T> gout = t.grad(self);
                           auto gx = t.grad(x);
                           for (std::size_t o = 0; o < gout.size(); ++o) gx[argmax[o]] += gout[o];
                       });
}

template <typename T>
Var dense(Tape<T>& tape, Var x, Var w, Var b) {
    const Shape& ws = tape.shape(w);
    require_rank(ws, 2, "dense", "kernel");
    const std::size_t m_n = ws[0], n_n = ws[1];
    if (numel(tape.shape(x)) != n_n)
        throw ShapeError("dense: input of shape " + shape_string(tape.shape(x)) + " does not match kernel " +
                         shape_string(ws));
    if (numel(tape.shape(b)) != m_n) throw ShapeError("dense: bias size must equal output width");
    std::vector<T> out(m_n);
    {
        auto xv = tape.value(x);
        auto wv = tape.value(w);
        auto bv = tape.value(b);
        for (std::size_t m = 0; m < m_n; ++m) {
            T acc = bv[m];
            const T* row = wv.data() + m * n_n;
            for (std::size_t n = 0; n < n_n; ++n) acc += row[n] * xv[n];
            out[m] = acc;
        }
    }
    return tape.record(Shape{m_n}, std::move(out), {x, w, b}, [=](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto xv = t.value(x);
        auto wv = t.value(w);
        if (t.requires_grad(w)) {
            auto gw = t.grad(w);
            for (std::size_t m = 0; m < m_n; ++m) {
                T* row = gw.data() + m * n_n;
                for (std::size_t n = 0; n < n_n; ++n) row[n] += gout[m] * xv[n];
            }
        }
        if (t.requires_grad(x)) {
            auto gx = t.grad(x);
            for (std::size_t m = 0; m < m_n; ++m) {
                const T* row = wv.data() + m * n_n;
                for (std::size_t n = 0; n < n_n; ++n) gx[n] += row[n] * gout[m];
            }
        }
        if (t.requires_grad(b)) accumulate(t.grad(b), gout);
    });
}

template <typename T>
Var relu(Tape<T>& tape, Var x) {
    auto xv = tape.value(x);
    std::vector<T> out(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : T(0);
    return tape.record(tape.shape(x), std::move(out), {x}, [x](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto xv = t.value(x);
        auto gx = t.grad(x);
        for (std::size_t i = 0; i < gx.size(); ++i)
            if (xv[i] > T(0)) gx[i] += gout[i];
    });
}

template <typename T>
Var sigmoid(Tape<T>& tape, Var x) {
    auto xv = tape.value(x);
    std::vector<T> out(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) {
        // Branches keep exp() from overflowing for large |x|.
        if (xv[i] >= T(0)) {
            out[i] = T(1) / (T(1) + std::exp(-xv[i]));
        } else {
            const T e = std::exp(xv[i]);
            out[i] = e / (T(1) + e);
        }
    }
    return tape.record(tape.shape(x), std::move(out), {x}, [x](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto y = t.value(self);
        auto gx = t.grad(x);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gout[i] * y[i] * (T(1) - y[i]);
    });
}

template <typename T>
Var subtract(Tape<T>& tape, Var a, Var b) {
    require_same(tape.shape(a), tape.shape(b), "subtract");
    auto av = tape.value(a);
    auto bv = tape.value(b);
    std::vector<T> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
    return tape.record(tape.shape(a), std::move(out), {a, b}, [a, b](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        if (t.requires_grad(a)) accumulate(t.grad(a), gout);
        if (t.requires_grad(b)) {
            auto gb = t.grad(b);
            for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= gout[i];
        }
    });
}

template <typename T>
Var residual_add(Tape<T>& tape, Var a, Var b) {
    require_same(tape.shape(a), tape.shape(b), "residual_add");
    auto av = tape.value(a);
    auto bv = tape.value(b);
    std::vector<T> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
    return tape.record(tape.shape(a), std::move(out), {a, b}, [a, b](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        if (t.requires_grad(a)) accumulate(t.grad(a), gout);
        if (t.requires_grad(b)) accumulate(t.grad(b), gout);
    });
}

template <typename T>
Var flatten(Tape<T>& tape, Var x) {
    auto xv = tape.value(x);
    return tape.record(Shape{xv.size()}, std::vector<T>(xv.begin(), xv.end()), {x}, [x](Tape<T>& t, Var self) {
        accumulate(t.grad(x), std::span<const T>(t.grad(self)));
    });
}

template <typename T>
Var scale(Tape<T>& tape, Var x, T factor) {
    auto xv = tape.value(x);
    std::vector<T> out(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
    return tape.record(tape.shape(x), std::move(out), {x}, [x, factor](Tape<T>& t, Var self) {
        std::span<const T> gout = t.grad(self);
        auto gx = t.grad(x);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gout[i] * factor;
    });
}

template <typename T>
Var sum(Tape<T>& tape, std::span<const Var> scalars) {
    T acc = T(0);
    for (Var v : scalars) {
        require_scalar(tape.shape(v), "sum");
        acc += tape.value(v)[0];
    }
    std::vector<Var> inputs(scalars.begin(), scalars.end());
    return tape.record(Shape{1}, std::vector<T>{acc}, scalars, [inputs](Tape<T>& t, Var self) {
        const T g = t.grad(self)[0];
        for (Var v : inputs)
            if (t.requires_grad(v)) t.grad(v)[0] += g;
    });
}

template <typename T>
Var mean(Tape<T>& tape, std::span<const Var> scalars) {
    if (scalars.empty()) throw ShapeError("mean: no inputs");
    return scale(tape, sum(tape, scalars), T(1) / static_cast<T>(scalars.size()));
}

template <typename T>
Var bce_loss(Tape<T>& tape, Var p, T label, T epsilon) {
    require_scalar(tape.shape(p), "bce_loss");
    const T pv = tape.value(p)[0];
    const T pc = std::clamp(pv, epsilon, T(1) - epsilon);
    const T loss = -(label * std::log(pc) + (T(1) - label) * std::log(T(1) - pc));
    const bool inside = pv > epsilon && pv < T(1) - epsilon;
    return tape.record(Shape{1}, std::vector<T>{loss}, {p}, [p, pc, label, inside](Tape<T>& t, Var self) {
        if (!inside) return;
        t.grad(p)[0] += t.grad(self)[0] * (-label / pc + (T(1) - label) / (T(1) - pc));
    });
}

template <typename T>
Var l2_penalty(Tape<T>& tape, std::span<const Var> kernels, T lambda) {
    if (lambda < T(0)) throw InvalidInput("l2_penalty: lambda must be >= 0");
    std::vector<Var> terms;
    terms.reserve(kernels.size());
    for (Var k : kernels) {
        auto v = tape.value(k);
        T ss = T(0);
        for (T e : v) ss += e * e;
        terms.push_back(tape.record(Shape{1}, std::vector<T>{lambda * ss}, {k}, [k, lambda](Tape<T>& t, Var self) {
            const T g = t.grad(self)[0];
            auto v = t.value(k);
            auto gk = t.grad(k);
            for (std::size_t i = 0; i < gk.size(); ++i) gk[i] += g * T(2) * lambda * v[i];
        }));
    }
    return sum(tape, std::span<const Var>(terms));
}

#define SIAMCUT_INSTANTIATE_OPS(T)                                                                          \
    template Var conv2d<T>(Tape<T>&, Var, Var, std::optional<Var>, std::size_t, Padding);                  \
    template Var depthwise_conv2d<T>(Tape<T>&, Var, Var, std::size_t, Padding);                            \
    template Var pointwise_conv2d<T>(Tape<T>&, Var, Var, std::optional<Var>);                              \
    template Var separable_conv2d<T>(Tape<T>&, Var, Var, Var, std::optional<Var>, std::size_t, Padding);   \
    template Var max_pool<T>(Tape<T>&, Var, std::size_t, std::size_t, Padding);                            \
    template Var dense<T>(Tape<T>&, Var, Var, Var);                                                        \
    template Var relu<T>(Tape<T>&, Var);                                                                   \
    template Var sigmoid<T>(Tape<T>&, Var);                                                                \
    template Var subtract<T>(Tape<T>&, Var, Var);                                                          \
    template Var residual_add<T>(Tape<T>&, Var, Var);                                                      \
    template Var flatten<T>(Tape<T>&, Var);                                                                \
    template Var scale<T>(Tape<T>&, Var, T);                                                               \
    template Var sum<T>(Tape<T>&, std::span<const Var>);                                                   \
    template Var mean<T>(Tape<T>&, std::span<const Var>);                                                  \
    template Var bce_loss<T>(Tape<T>&, Var, T, T);                                                         \
    template Var l2_penalty<T>(Tape<T>&, std::span<const Var>, T);

SIAMCUT_INSTANTIATE_OPS(float)
SIAMCUT_INSTANTIATE_OPS(double)

#undef SIAMCUT_INSTANTIATE_OPS

}  // namespace siamcut::ad

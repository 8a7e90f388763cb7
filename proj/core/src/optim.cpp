// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/optim.hpp"

#include <cmath>

#include "siamcut/errors.hpp"

namespace siamcut::ad {

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
    if (fan_in == 0 || fan_out == 0) throw InvalidInput("xavier: fans must be positive");
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename T>
Tensor<T> xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double bound = xavier_bound(fan_in, fan_out);
    Tensor<T> t(std::move(shape));
    for (auto& v : t.values) v = static_cast<T>(rng.uniform(-bound, bound));
    t.requires_grad = true;
    return t;
}

template <typename T>
void adam_step(AdamState<T>& state, std::span<Tensor<T>* const> params) {
    if (state.m.empty()) {
        for (const auto* p : params) {
            state.m.emplace_back(p->values.size(), T(0));
            state.v.emplace_back(p->values.size(), T(0));
        }
    }
    if (state.m.size() != params.size()) throw ShapeError("adam_step: parameter count changed between steps");
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor<T>& p = *params[k];
        auto& m = state.m[k];
        auto& v = state.v[k];
        if (m.size() != p.values.size()) throw ShapeError("adam_step: moment shape does not match parameter");
        if (!p.grad.empty() && p.grad.size() != p.values.size())
            throw ShapeError("adam_step: gradient shape does not match parameter");
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            const T g = p.grad.empty() ? T(0) : p.grad[i];
            m[i] = b1 * m[i] + (T(1) - b1) * g;
            v[i] = b2 * v[i] + (T(1) - b2) * g * g;
            const double mhat = m[i] / c1, vhat = v[i] / c2;
            const auto update = static_cast<T>(state.lr * mhat / (std::sqrt(vhat) + state.epsilon));
            if (update != T(0)) p.values[i] -= update;
        }
    }
}

template <typename T>
void decay_lr(AdamState<T>& state) {
    state.lr *= state.decay;
}

template Tensor<float> xavier_uniform<float>(Shape, std::size_t, std::size_t, Rng&);
template Tensor<double> xavier_uniform<double>(Shape, std::size_t, std::size_t, Rng&);
template void adam_step<float>(AdamState<float>&, std::span<Tensor<float>* const>);
template void adam_step<double>(AdamState<double>&, std::span<Tensor<double>* const>);
template void decay_lr<float>(AdamState<float>&);
template void decay_lr<double>(AdamState<double>&);

}  // namespace siamcut::ad

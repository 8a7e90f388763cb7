// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "siamcut/random.hpp"
#include "siamcut/tensor.hpp"

namespace siamcut::ad {

/// sqrt(6 / (fan_in + fan_out))
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

/// I.i.d. uniform on [-bound, +bound] with the Xavier/Glorot bound.
template <typename T>
Tensor<T> xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Adam with bias correction. One moment pair per parameter tensor, in the
/// order the parameters are passed to adam_step.
template <typename T>
struct AdamState {
    double lr = 1e-4;
    double decay = 0.99;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
};

/// Updates every parameter from its grad buffer (missing grad counts as
/// zero). Moments are allocated on the first call.
template <typename T>
void adam_step(AdamState<T>& state, std::span<Tensor<T>* const> params);

/// lr *= decay
template <typename T>
void decay_lr(AdamState<T>& state);

}  // namespace siamcut::ad

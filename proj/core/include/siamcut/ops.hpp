// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable operations recorded on a Tape. Feature maps are single
// images laid out (C, H, W); vectors are rank 1. Instantiated for float
// (training) and double (gradient verification).

#pragma once

#include <optional>
#include <span>

#include "siamcut/tape.hpp"

namespace siamcut::ad {

enum class Padding { Valid, Same };

/// Output extent along one axis: valid -> floor((n-k)/s)+1, same -> ceil(n/s).
/// Throws ShapeError when a valid window does not fit.
std::size_t conv_output_size(std::size_t n, std::size_t k, std::size_t stride, Padding padding);
/// Zero padding inserted before the first element along one axis.
std::size_t conv_pad_before(std::size_t n, std::size_t k, std::size_t stride, Padding padding);

/// Cross-correlation. x (Ci, H, W), w (Co, Ci, k, k), b (Co) optional.
template <typename T>
Var conv2d(Tape<T>& tape, Var x, Var w, std::optional<Var> b, std::size_t stride, Padding padding);

/// Per-channel spatial filter. x (C, H, W), w (C, k, k).
template <typename T>
Var depthwise_conv2d(Tape<T>& tape, Var x, Var w, std::size_t stride, Padding padding);

/// 1x1 channel mixing. x (Ci, H, W), w (Co, Ci), b (Co) optional.
template <typename T>
Var pointwise_conv2d(Tape<T>& tape, Var x, Var w, std::optional<Var> b);

/// Depthwise then pointwise; the bias belongs to the pointwise stage.
template <typename T>
Var separable_conv2d(Tape<T>& tape, Var x, Var w_depth, Var w_point, std::optional<Var> b, std::size_t stride,
                     Padding padding);

/// Max over k x k windows; same padding ignores out-of-image cells.
template <typename T>
Var max_pool(Tape<T>& tape, Var x, std::size_t kernel, std::size_t stride, Padding padding);

/// y = W x + b. x (N), W (M, N), b (M).
template <typename T>
Var dense(Tape<T>& tape, Var x, Var w, Var b);

template <typename T>
Var relu(Tape<T>& tape, Var x);

template <typename T>
Var sigmoid(Tape<T>& tape, Var x);

template <typename T>
Var subtract(Tape<T>& tape, Var a, Var b);

/// Elementwise sum of two same-shape tensors (skip connections).
template <typename T>
Var residual_add(Tape<T>& tape, Var a, Var b);

template <typename T>
Var flatten(Tape<T>& tape, Var x);

template <typename T>
Var scale(Tape<T>& tape, Var x, T factor);

/// Mean of scalar nodes.
template <typename T>
Var mean(Tape<T>& tape, std::span<const Var> scalars);

template <typename T>
Var sum(Tape<T>& tape, std::span<const Var> scalars);

inline constexpr double kBceEpsilon = 1e-7;

/// -(y log p + (1-y) log(1-p)) with p clamped to [eps, 1-eps]; the
/// gradient is zero where the clamp is active.
template <typename T>
Var bce_loss(Tape<T>& tape, Var p, T label, T epsilon = T(kBceEpsilon));

/// lambda * sum of squared entries over every tensor in `kernels`.
template <typename T>
Var l2_penalty(Tape<T>& tape, std::span<const Var> kernels, T lambda);

}  // namespace siamcut::ad

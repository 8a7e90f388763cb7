// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace siamcut {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array with an optional gradient buffer of the same shape.
/// Image-like tensors are laid out channel-major (C, H, W).
template <typename T>
struct Tensor {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad;
    bool requires_grad = false;

    Tensor() = default;
    explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), values(numel(shape), fill) {}
    Tensor(Shape s, std::vector<T> v);

    std::size_t size() const noexcept { return values.size(); }

    /// Allocates (if needed) and clears the gradient buffer.
    void zero_grad() { grad.assign(values.size(), T(0)); }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(shape);
        for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = static_cast<U>(values[i]);
        out.requires_grad = requires_grad;
        return out;
    }
};

extern template struct Tensor<float>;
extern template struct Tensor<double>;

}  // namespace siamcut

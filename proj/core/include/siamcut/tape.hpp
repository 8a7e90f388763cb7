// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode gradient tape. Nodes are appended in evaluation order, so the
// reverse of insertion order is a valid topological order for backward.
// A tape is single-use and single-threaded; independent tapes may run
// concurrently.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "siamcut/tensor.hpp"

namespace siamcut::ad {

/// Handle to a node on a tape.
struct Var {
    std::uint32_t id = std::numeric_limits<std::uint32_t>::max();
    bool valid() const noexcept { return id != std::numeric_limits<std::uint32_t>::max(); }
};

template <typename T>
class Tape {
public:
    using Backward = std::function<void(Tape&, Var self)>;

    Var constant(Shape shape, std::vector<T> values);
    Var constant(const Tensor<T>& t) { return constant(t.shape, t.values); }

    /// Leaf tied to `param`: backward accumulates into param.grad
    /// (allocated on demand). `param` must outlive backward().
    Var parameter(Tensor<T>& param);

    /// Appends an op result. `backward` reads grad(self) and accumulates into
    /// the grads of those inputs that require_grad.
    Var record(Shape shape, std::vector<T> values, std::span<const Var> inputs, Backward backward);
    Var record(Shape shape, std::vector<T> values, std::initializer_list<Var> inputs, Backward backward) {
        return record(std::move(shape), std::move(values), std::span<const Var>(inputs.begin(), inputs.size()),
                      std::move(backward));
    }

    const Shape& shape(Var v) const { return nodes_[v.id].shape; }
    std::span<const T> value(Var v) const { return nodes_[v.id].value; }
    T item(Var v) const;
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

    /// Gradient buffer of `v`, zero-initialized on first access.
    std::span<T> grad(Var v);
    bool has_grad(Var v) const { return !nodes_[v.id].grad.empty(); }

    /// Seeds d(root)/d(root) = 1 for a scalar root and runs every recorded
    /// backward once, newest first. May be called once per tape.
    void backward(Var root);

    std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct Node {
        Shape shape;
        std::vector<T> value;
        std::vector<T> grad;
        bool requires_grad = false;
        Tensor<T>* param = nullptr;
        Backward backward;
    };

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace siamcut::ad

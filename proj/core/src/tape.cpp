// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/tape.hpp"

#include "siamcut/errors.hpp"

namespace siamcut {

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_string(const Shape& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

template <typename T>
Tensor<T>::Tensor(Shape s, std::vector<T> v) : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != numel(shape))
        throw ShapeError("tensor of shape " + shape_string(shape) + " given " + std::to_string(values.size()) +
                         " values");
}

template struct Tensor<float>;
template struct Tensor<double>;

namespace ad {

template <typename T>
Var Tape<T>::constant(Shape shape, std::vector<T> values) {
    if (values.size() != numel(shape)) throw ShapeError("constant: value count does not match shape");
    nodes_.push_back(Node{std::move(shape), std::move(values), {}, false, nullptr, {}});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var Tape<T>::parameter(Tensor<T>& param) {
    nodes_.push_back(Node{param.shape, param.values, {}, true, &param, {}});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var Tape<T>::record(Shape shape, std::vector<T> values, std::span<const Var> inputs, Backward backward) {
    bool needs = false;
    for (Var v : inputs) needs = needs || nodes_[v.id].requires_grad;
    nodes_.push_back(Node{std::move(shape), std::move(values), {}, needs, nullptr,
                          needs ? std::move(backward) : Backward{}});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
T Tape<T>::item(Var v) const {
    const auto& n = nodes_[v.id];
    if (n.value.size() != 1) throw ShapeError("item: tensor of shape " + shape_string(n.shape) + " is not a scalar");
    return n.value[0];
}

template <typename T>
std::span<T> Tape<T>::grad(Var v) {
    auto& n = nodes_[v.id];
    if (n.grad.empty()) n.grad.assign(n.value.size(), T(0));
    return n.grad;
}

template <typename T>
void Tape<T>::backward(Var root) {
    if (backward_done_) throw InvalidInput("backward: tape already consumed");
    backward_done_ = true;
    if (nodes_[root.id].value.size() != 1) throw ShapeError("backward: root must be a scalar");
    grad(root)[0] = T(1);
    for (std::uint32_t id = root.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.grad.empty()) continue;
        if (n.backward) n.backward(*this, Var{id});
        if (n.param) {
            if (n.param->grad.size() != n.grad.size()) n.param->grad.assign(n.grad.size(), T(0));
            for (std::size_t i = 0; i < n.grad.size(); ++i) n.param->grad[i] += n.grad[i];
        }
    }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace ad
}  // namespace siamcut

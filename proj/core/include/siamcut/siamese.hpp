// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Pair-verification network: one backbone applied to both images with a
// single shared weight set, feature maps subtracted (first minus second),
// flattened, then dense(64)+ReLU, dense(32)+ReLU, dense(1)+sigmoid.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "siamcut/backbone.hpp"
#include "siamcut/image.hpp"
#include "siamcut/optim.hpp"
#include "siamcut/random.hpp"
#include "siamcut/tape.hpp"

namespace siamcut::siamese {

inline constexpr std::array<std::size_t, 3> kHeadWidths = {64, 32, 1};

/// Parameters of the dense head for a flattened input of `input_size`.
std::size_t head_param_count(std::size_t input_size);

template <typename T>
class Model {
public:
    /// Xavier-uniform kernels (backbone and head), zero biases.
    static Model build(backbone::BackboneConfig config, Rng& init_rng);
    /// Same layout with every parameter zero.
    static Model zeros(backbone::BackboneConfig config);

    const backbone::BackboneConfig& config() const noexcept { return config_; }
    const std::vector<backbone::ParamSpec>& specs() const noexcept { return specs_; }
    std::span<Tensor<T>> params() noexcept { return params_; }
    std::span<const Tensor<T>> params() const noexcept { return params_; }
    std::size_t backbone_tensor_count() const noexcept { return backbone_tensors_; }
    std::size_t head_input_size() const noexcept { return head_input_; }
    std::size_t param_count() const;

    Tensor<T>& param(std::string_view name);
    const Tensor<T>& param(std::string_view name) const;

    /// Indices of the dense-head kernels (the default L2 targets).
    std::vector<std::size_t> head_kernel_indices() const;

    template <typename U>
    Model<U> cast() const {
        Model<U> out = Model<U>::zeros(config_);
        for (std::size_t i = 0; i < params_.size(); ++i) out.params()[i] = params_[i].template cast<U>();
        return out;
    }

private:
    Model() = default;
    static Model allocate(backbone::BackboneConfig config);

    backbone::BackboneConfig config_;
    std::vector<backbone::ParamSpec> specs_;
    std::vector<Tensor<T>> params_;
    std::size_t backbone_tensors_ = 0;
    std::size_t head_input_ = 0;
};

/// Adds every parameter to `tape` as a gradient-tracked leaf.
template <typename T>
std::vector<ad::Var> bind_parameters(ad::Tape<T>& tape, Model<T>& model);
/// Adds every parameter as a constant (inference).
template <typename T>
std::vector<ad::Var> bind_constants(ad::Tape<T>& tape, const Model<T>& model);

/// Backbone features of one image.
template <typename T>
ad::Var features(ad::Tape<T>& tape, const Model<T>& model, std::span<const ad::Var> params, ad::Var image);

/// Head on the difference of two feature maps; returns the probability node.
template <typename T>
ad::Var head(ad::Tape<T>& tape, const Model<T>& model, std::span<const ad::Var> params, ad::Var features_a,
             ad::Var features_b);

/// sigmoid(head(flatten(f(a) - f(b)))) recorded on `tape`.
template <typename T>
ad::Var pair_probability(ad::Tape<T>& tape, const Model<T>& model, std::span<const ad::Var> params, ad::Var a,
                         ad::Var b);

/// Gradient-free convenience: probability that `a` and `b` share a class.
/// Argument order matters; the first image is the query.
template <typename T>
T forward_pair(const Model<T>& model, const Tensor<T>& a, const Tensor<T>& b);

/// Resizes to the backbone input, converts to full-range YCbCr scaled to
/// [0, 1] and lays out as (3, H, W).
Tensor<float> to_network_input(const Image& rgb, std::size_t height, std::size_t width);

template <typename T>
Tensor<T> to_network_input(const Image& rgb, const backbone::BackboneConfig& config) {
    return to_network_input(rgb, config.input.height, config.input.width).template cast<T>();
}

// Checkpoint file:
//   "HNET1"                          magic and format version
//   u32 n, n bytes                   backbone config text
//   u32 count                        then per tensor:
//     u32 n, n bytes name; u32 rank; rank x u32 dims; f32 values
//   u8 has_state                     then, when 1:
//     u32 epoch; f64 lr; f64 decay; u64 adam step; u32 count;
//     per tensor: u32 n; n x f32 first moment; n x f32 second moment
// All integers and floats little-endian.

struct TrainingState {
    std::uint32_t epoch = 0;  // completed epochs
    ad::AdamState<float> adam;
};

struct Checkpoint {
    Model<float> model;
    std::optional<TrainingState> state;
};

std::vector<std::uint8_t> serialize(const Model<float>& model, const TrainingState* state = nullptr);
Checkpoint deserialize(std::span<const std::uint8_t> bytes);

void save(const std::filesystem::path& path, const Model<float>& model, const TrainingState* state = nullptr);
Checkpoint load(const std::filesystem::path& path);

}  // namespace siamcut::siamese

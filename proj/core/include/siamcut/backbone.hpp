// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Declarative feature extractor: a stack of convolution, depthwise-separable
// and pooling blocks with optional residual shortcuts.
//
// Config text (see kvconfig.hpp for the line grammar):
//
//   input = 64, 64, 3          # height, width, channels
//   [block]
//   kind = sepconv             # conv | sepconv | maxpool
//   kernel = 3
//   stride = 2
//   channels = 32              # one value, or one per layer
//   repeat = 2                 # layers in the block
//   residual = true
//   padding = same             # same | valid
//   bias = true
//   pool_kernel = 3            # sepconv blocks with stride > 1
//
// Block semantics:
//   conv     `repeat` standard convolutions; the first carries `stride`.
//   sepconv  `repeat` stride-1 separable convolutions, then a max pool with
//            `pool_kernel`/`stride`/same padding when stride > 1.
//   maxpool  one pooling window of `kernel`/`stride`/`padding`.
// Every layer is followed by ReLU. In a residual block the last layer's ReLU
// is applied after adding the shortcut, which is the identity when the block
// preserves shape and a strided 1x1 projection otherwise.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "siamcut/ops.hpp"
#include "siamcut/tape.hpp"

namespace siamcut::backbone {

enum class BlockKind { Conv, SepConv, MaxPool };

struct Block {
    BlockKind kind = BlockKind::SepConv;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::vector<std::size_t> channels;  // empty for maxpool
    std::size_t repeat = 1;
    bool residual = false;
    ad::Padding padding = ad::Padding::Same;
    bool bias = true;
    std::size_t pool_kernel = 3;

    std::size_t layer_channels(std::size_t layer) const {
        return channels.size() == 1 ? channels[0] : channels.at(layer);
    }
};

/// (height, width, channels)
struct FeatureShape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;

    std::size_t size() const noexcept { return height * width * channels; }
    friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

std::string to_string(const FeatureShape& s);

struct BackboneConfig {
    FeatureShape input{64, 64, 3};
    std::vector<Block> blocks;

    static BackboneConfig parse(std::string_view text);
    static BackboneConfig load(const std::filesystem::path& path);
    /// Canonical text; parse(to_text()) reproduces the config.
    std::string to_text() const;
};

/// Output shape of every block, in order. Throws ConfigError carrying the
/// index of the first incompatible block.
std::vector<FeatureShape> infer_shapes(const BackboneConfig& config);
FeatureShape output_shape(const BackboneConfig& config);

struct ParamSpec {
    std::string name;
    Shape shape;
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    bool is_kernel = false;  // false for biases
};

/// Learnable tensors in allocation order; forward() consumes them in this order.
std::vector<ParamSpec> param_specs(const BackboneConfig& config);
std::size_t param_count(const BackboneConfig& config);

/// Records the feature extractor on `tape`. `params` follow param_specs();
/// `image` is (3, H, W) in network color space. Returns (C, h, w).
template <typename T>
ad::Var forward(ad::Tape<T>& tape, const BackboneConfig& config, std::span<const ad::Var> params, ad::Var image);

}  // namespace siamcut::backbone

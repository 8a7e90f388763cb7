// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "siamcut/image.hpp"
#include "siamcut/random.hpp"

namespace siamcut::augment {

// Application order is the enumeration order.
enum class Technique {
    FlipLR,
    FlipUD,
    Crop,
    Pad,
    Scale,
    Translate,
    Rotate,
    Shear,
    Warp,
    Brightness,
    PiecewiseAffine,
};
inline constexpr std::size_t kTechniqueCount = 11;

std::string_view technique_name(Technique t);

struct Ranges {
    double crop_fraction = 0.10;  // per side
    double pad_fraction = 0.10;   // per side
    double scale_min = 0.85;
    double scale_max = 1.15;
    double translate_fraction = 0.10;
    double rotate_degrees = 25.0;
    double shear_degrees = 15.0;
    double warp_fraction = 0.03;  // displacement amplitude relative to image size
    double brightness_delta = 40.0;
    double piecewise_jitter = 0.03;
    int piecewise_grid = 4;
};

struct AugmentConfig {
    std::array<double, kTechniqueCount> probability;  // per technique
    Ranges ranges;
    int output_width = 0;  // 0 keeps the input size
    int output_height = 0;

    /// Every technique enabled with probability `p`.
    static AugmentConfig uniform(double p);
};

/// Which techniques fired for one call.
using Applied = std::array<bool, kTechniqueCount>;

/// Stochastic augmentation. Owns its random stream: one pipeline per worker.
class Pipeline {
public:
    Pipeline(AugmentConfig config, std::uint64_t seed);

    const AugmentConfig& config() const noexcept { return config_; }

    Image apply(const Image& img);
    Image apply(const Image& img, Applied& applied);
    std::pair<Image, Image> apply_pair(const Image& a, const Image& b);
    std::vector<Image> preview(const Image& img, int n);

private:
    AugmentConfig config_;
    Rng rng_;
};

// Deterministic building blocks, exposed for testing and reuse.
Image flip_lr(const Image& img);
Image flip_ud(const Image& img);
Image adjust_brightness(const Image& img, double delta);

/// 2x3 inverse map: output pixel (x, y) samples the source at
/// (m[0]x + m[1]y + m[2], m[3]x + m[4]y + m[5]).
using Affine = std::array<double, 6>;
Image warp_affine(const Image& img, const Affine& inverse_map);

}  // namespace siamcut::augment

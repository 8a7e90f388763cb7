// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Classical image operations behind the cut-segmentation chain:
//   blur -> YCbCr -> Otsu on one chroma channel -> binarize -> close -> open
// All functions are pure.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "siamcut/image.hpp"

namespace siamcut::imaging {

/// Full-range BT.601, rounded half-up then clamped.
Image rgb_to_ycbcr(const Image& rgb);
/// Inverse of rgb_to_ycbcr (same rounding).
Image ycbcr_to_rgb(const Image& ycc);

/// Conventional size-to-sigma rule: 0.3*((k-1)/2 - 1) + 0.8.
double default_sigma(int kernel_size);

/// Normalized 1-D Gaussian taps (sum 1).
std::vector<double> gaussian_kernel(int kernel_size, double sigma);

enum class Border { Replicate, Wrap };

/// Separable Gaussian on one float plane.
std::vector<double> blur_plane(std::span<const double> plane, int width, int height, int kernel_size, double sigma,
                               Border border = Border::Replicate);

/// Per-channel separable Gaussian, edge replication. sigma <= 0 selects
/// default_sigma(kernel_size).
Image gaussian_blur(const Image& img, int kernel_size = 15, double sigma = 0.0);

/// Smallest t maximizing between-class variance of classes {<=t} and {>t}.
/// Throws DegenerateHistogram when fewer than two distinct values occur.
int otsu_threshold(const Image& gray);
int otsu_threshold(const std::array<std::uint64_t, 256>& histogram);

std::array<std::uint64_t, 256> histogram(const Image& gray);

/// Foreground where value > t.
BinaryMask binarize(const Image& gray, int t);

enum class ElementShape { Square, Ellipse };

class StructuringElement {
public:
    StructuringElement(ElementShape shape = ElementShape::Square, int size = 5);

    ElementShape shape() const noexcept { return shape_; }
    int size() const noexcept { return size_; }
    int radius() const noexcept { return size_ / 2; }
    /// Offset (dx, dy) in [-radius, radius]^2 belongs to the element.
    bool contains(int dx, int dy) const;

private:
    ElementShape shape_;
    int size_;
};

// Pixels outside the image are ignored by both operators (equivalently:
// background for dilation, foreground for erosion), which keeps
// open(m) == !close(!m).
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se);

/// Pixels where the mask is background set to zero.
Image apply_mask(const Image& img, const BinaryMask& mask);

/// Bilinear resampling with edge replication (pixel-center aligned).
Image resize_bilinear(const Image& img, int width, int height);

enum class YccChannel { Y = 0, Cb = 1, Cr = 2 };

struct SegmentationParams {
    int blur_kernel = 15;
    double blur_sigma = 0.0;  // <= 0: default_sigma(blur_kernel)
    YccChannel channel = YccChannel::Cr;
    bool invert = false;  // foreground = at or below threshold
    StructuringElement close_element{ElementShape::Square, 5};
    StructuringElement open_element{ElementShape::Square, 5};
};

/// Every intermediate of the chain, in order.
struct SegmentationTrace {
    Image blurred;
    Image ycbcr;
    Image channel;
    int threshold = 0;
    BinaryMask binary;
    BinaryMask closed;
    BinaryMask opened;  // final mask
    Image masked;
};

struct Segmentation {
    BinaryMask mask;
    Image masked;
};

SegmentationTrace segment_cut_traced(const Image& rgb, const SegmentationParams& params = {});
Segmentation segment_cut(const Image& rgb, const SegmentationParams& params = {});

}  // namespace siamcut::imaging

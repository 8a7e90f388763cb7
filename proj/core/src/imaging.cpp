// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "siamcut/errors.hpp"

namespace siamcut::imaging {

namespace {

void require_rgb(const Image& img, const char* op) {
    if (img.channels() != 3) throw InvalidInput(std::string(op) + ": expected a 3-channel image");
}

void require_gray(const Image& img, const char* op) {
    if (img.channels() != 1) throw InvalidInput(std::string(op) + ": expected a 1-channel image");
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

int wrap_index(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

}  // namespace

Image rgb_to_ycbcr(const Image& rgb) {
    require_rgb(rgb, "rgb_to_ycbcr");
    Image out(rgb.width(), rgb.height(), 3);
    auto src = rgb.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); i += 3) {
        const double r = src[i], g = src[i + 1], b = src[i + 2];
        dst[i] = to_u8(0.299 * r + 0.587 * g + 0.114 * b);
        dst[i + 1] = to_u8(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b);
        dst[i + 2] = to_u8(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b);
    }
    return out;
}

Image ycbcr_to_rgb(const Image& ycc) {
    require_rgb(ycc, "ycbcr_to_rgb");
    Image out(ycc.width(), ycc.height(), 3);
    auto src = ycc.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); i += 3) {
        const double y = src[i], cb = src[i + 1] - 128.0, cr = src[i + 2] - 128.0;
        dst[i] = to_u8(y + 1.402 * cr);
        dst[i + 1] = to_u8(y - 0.344136 * cb - 0.714136 * cr);
        dst[i + 2] = to_u8(y + 1.772 * cb);
    }
    return out;
}

double default_sigma(int kernel_size) { return 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8; }

std::vector<double> gaussian_kernel(int kernel_size, double sigma) {
    if (kernel_size < 1 || kernel_size % 2 == 0) throw InvalidInput("gaussian kernel size must be odd and >= 1");
    if (!(sigma > 0.0)) throw InvalidInput("gaussian sigma must be positive");
    const int r = kernel_size / 2;
    std::vector<double> k(static_cast<std::size_t>(kernel_size));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i + r)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

std::vector<double> blur_plane(std::span<const double> plane, int width, int height, int kernel_size, double sigma,
                               Border border) {
    const auto taps = gaussian_kernel(kernel_size, sigma);
    const int r = kernel_size / 2;
    auto index = [border](int i, int n) { return border == Border::Wrap ? wrap_index(i, n) : clamp_index(i, n); };
    std::vector<double> tmp(plane.size()), out(plane.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += taps[static_cast<std::size_t>(i + r)] *
                       plane[static_cast<std::size_t>(y) * width + index(x + i, width)];
            tmp[static_cast<std::size_t>(y) * width + x] = acc;
        }
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += taps[static_cast<std::size_t>(i + r)] *
                       tmp[static_cast<std::size_t>(index(y + i, height)) * width + x];
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    return out;
}

Image gaussian_blur(const Image& img, int kernel_size, double sigma) {
    if (kernel_size < 1 || kernel_size % 2 == 0) throw InvalidInput("gaussian_blur: kernel size must be odd");
    if (sigma <= 0.0) sigma = default_sigma(kernel_size);
    const int w = img.width(), h = img.height(), ch = img.channels();
    Image out(w, h, ch);
    std::vector<double> plane(static_cast<std::size_t>(w) * h);
    for (int c = 0; c < ch; ++c) {
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = img.data()[i * ch + c];
        const auto blurred = blur_plane(plane, w, h, kernel_size, sigma, Border::Replicate);
        for (std::size_t i = 0; i < plane.size(); ++i) out.data()[i * ch + c] = to_u8(blurred[i]);
    }
    return out;
}

std::array<std::uint64_t, 256> histogram(const Image& gray) {
    require_gray(gray, "histogram");
    std::array<std::uint64_t, 256> h{};
    for (auto v : gray.data()) ++h[v];
    return h;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
    __extension__ typedef unsigned __int128 u128;
    std::uint64_t total = 0, total_sum = 0;
    int populated = 0;
    for (int i = 0; i < 256; ++i) {
        total += hist[i];
        total_sum += hist[i] * static_cast<std::uint64_t>(i);
        populated += hist[i] != 0;
    }
    if (populated < 2) throw DegenerateHistogram("otsu_threshold: fewer than two distinct values");
    if (total > (1ULL << 27)) throw InvalidInput("otsu_threshold: histogram too large for exact arithmetic");

    // sigma_B^2(t) = (N*S0 - n0*S)^2 / (N^2 * n0 * n1). The common N^2 factor
    // is dropped and candidates are compared as exact rationals num/den,
    // split into quotient and remainder so every product fits in 128 bits.
    struct Score {
        u128 quot = 0;
        u128 rem = 0;
        u128 den = 1;
    };
    auto greater = [](const Score& a, const Score& b) {
        if (a.quot != b.quot) return a.quot > b.quot;
        return a.rem * b.den > b.rem * a.den;
    };

    Score best{};
    int best_t = 0;
    bool have_best = false;
    std::uint64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t n1 = total - n0;
        Score s{};
        if (n0 != 0 && n1 != 0) {
            const auto a = static_cast<std::int64_t>(total * s0);
            const auto b = static_cast<std::int64_t>(n0 * total_sum);
            const std::uint64_t diff = a >= b ? static_cast<std::uint64_t>(a - b) : static_cast<std::uint64_t>(b - a);
            const u128 num = static_cast<u128>(diff) * diff;
            s.den = static_cast<u128>(n0) * n1;
            s.quot = num / s.den;
            s.rem = num % s.den;
        }
        if (!have_best || greater(s, best)) {
            best = s;
            best_t = t;
            have_best = true;
        }
    }
    return best_t;
}

int otsu_threshold(const Image& gray) { return otsu_threshold(histogram(gray)); }

BinaryMask binarize(const Image& gray, int t) {
    require_gray(gray, "binarize");
    BinaryMask m(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) m.set(x, y, gray.at(x, y) > t);
    return m;
}

StructuringElement::StructuringElement(ElementShape shape, int size) : shape_(shape), size_(size) {
    if (size < 1 || size % 2 == 0) throw InvalidInput("structuring element size must be odd and >= 1");
}

bool StructuringElement::contains(int dx, int dy) const {
    const int r = radius();
    if (dx < -r || dx > r || dy < -r || dy > r) return false;
    if (shape_ == ElementShape::Square || r == 0) return true;
    const double fx = dx / (r + 0.5), fy = dy / (r + 0.5);
    return fx * fx + fy * fy <= 1.0;
}

namespace {

// Offsets of the element; symmetric shapes only, so reflection is a no-op.
std::vector<std::pair<int, int>> element_offsets(const StructuringElement& se) {
    std::vector<std::pair<int, int>> offs;
    const int r = se.radius();
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (se.contains(dx, dy)) offs.emplace_back(dx, dy);
    return offs;
}

template <bool Dilate>
BinaryMask morph(const BinaryMask& mask, const StructuringElement& se) {
    const int w = mask.width(), h = mask.height();
    const auto offs = element_offsets(se);
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool v = !Dilate;
            for (auto [dx, dy] : offs) {
                const int sx = x + dx, sy = y + dy;
                if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
                if (mask.at(sx, sy) == Dilate) {
                    v = Dilate;
                    break;
                }
            }
            out.set(x, y, v);
        }
    return out;
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) { return morph<true>(mask, se); }
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) { return morph<false>(mask, se); }
BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se) { return erode(dilate(mask, se), se); }
BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se) { return dilate(erode(mask, se), se); }

Image apply_mask(const Image& img, const BinaryMask& mask) {
    if (img.width() != mask.width() || img.height() != mask.height())
        throw InvalidInput("apply_mask: mask size differs from image");
    Image out = img;
    const int ch = img.channels();
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (!mask.at(x, y))
                for (int c = 0; c < ch; ++c) out.at(x, y, c) = 0;
    return out;
}

Image resize_bilinear(const Image& img, int width, int height) {
    if (width <= 0 || height <= 0) throw InvalidInput("resize_bilinear: target size must be positive");
    if (width == img.width() && height == img.height()) return img;
    const int ch = img.channels();
    Image out(width, height, ch);
    const double sx = static_cast<double>(img.width()) / width;
    const double sy = static_cast<double>(img.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double tx = fx - x0;
            for (int c = 0; c < ch; ++c) {
                const double top = img.at(x0, y0, c) * (1 - tx) + img.at(x1, y0, c) * tx;
                const double bot = img.at(x0, y1, c) * (1 - tx) + img.at(x1, y1, c) * tx;
                out.at(x, y, c) = to_u8(top * (1 - ty) + bot * ty);
            }
        }
    }
    return out;
}

SegmentationTrace segment_cut_traced(const Image& rgb, const SegmentationParams& params) {
    require_rgb(rgb, "segment_cut");
    SegmentationTrace t;
    t.blurred = gaussian_blur(rgb, params.blur_kernel, params.blur_sigma);
    t.ycbcr = rgb_to_ycbcr(t.blurred);
    t.channel = t.ycbcr.channel(static_cast<int>(params.channel));
    t.threshold = otsu_threshold(t.channel);
    t.binary = binarize(t.channel, t.threshold);
    if (params.invert) t.binary = t.binary.inverted();
    t.closed = morph_close(t.binary, params.close_element);
    t.opened = morph_open(t.closed, params.open_element);
    t.masked = apply_mask(rgb, t.opened);
    return t;
}

Segmentation segment_cut(const Image& rgb, const SegmentationParams& params) {
    auto t = segment_cut_traced(rgb, params);
    return {std::move(t.opened), std::move(t.masked)};
}

}  // namespace siamcut::imaging

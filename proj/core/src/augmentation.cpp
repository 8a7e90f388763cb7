// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "siamcut/errors.hpp"
#include "siamcut/imaging.hpp"

namespace siamcut::augment {

std::string_view technique_name(Technique t) {
    static constexpr std::array<std::string_view, kTechniqueCount> names = {
        "flip_lr", "flip_ud", "crop", "pad", "scale", "translate", "rotate", "shear", "warp", "brightness",
        "piecewise_affine"};
    return names[static_cast<std::size_t>(t)];
}

AugmentConfig AugmentConfig::uniform(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("augmentation probability must be in [0, 1]");
    AugmentConfig c;
    c.probability.fill(p);
    return c;
}

namespace {

double sample(const Image& img, double fx, double fy, int c) {
    fx = std::clamp(fx, 0.0, img.width() - 1.0);
    fy = std::clamp(fy, 0.0, img.height() - 1.0);
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
    const double tx = fx - x0, ty = fy - y0;
    const double top = img.at(x0, y0, c) * (1 - tx) + img.at(x1, y0, c) * tx;
    const double bot = img.at(x0, y1, c) * (1 - tx) + img.at(x1, y1, c) * tx;
    return top * (1 - ty) + bot * ty;
}

// Output-to-source coordinate map, evaluated per output pixel.
template <typename Map>
Image remap(const Image& img, Map&& map) {
    Image out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const auto [sx, sy] = map(static_cast<double>(x), static_cast<double>(y));
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = to_u8(sample(img, sx, sy, c));
        }
    return out;
}

// Affine about the image center: source = center + A * (out - center) + t.
Affine centered(const Image& img, double a, double b, double c, double d, double tx = 0, double ty = 0) {
    const double cx = (img.width() - 1) * 0.5, cy = (img.height() - 1) * 0.5;
    return {a, b, cx - a * cx - b * cy + tx, c, d, cy - c * cx - d * cy + ty};
}

Image crop(const Image& img, Rng& rng, double f) {
    const double w = img.width(), h = img.height();
    const double l = rng.uniform(0, f) * w, r = rng.uniform(0, f) * w;
    const double t = rng.uniform(0, f) * h, b = rng.uniform(0, f) * h;
    const double sx = (w - l - r) / w, sy = (h - t - b) / h;
    return remap(img, [&](double x, double y) {
        return std::pair{l + (x + 0.5) * sx - 0.5, t + (y + 0.5) * sy - 0.5};
    });
}

Image pad(const Image& img, Rng& rng, double f) {
    const double w = img.width(), h = img.height();
    const double l = rng.uniform(0, f) * w, r = rng.uniform(0, f) * w;
    const double t = rng.uniform(0, f) * h, b = rng.uniform(0, f) * h;
    const double sx = (w + l + r) / w, sy = (h + t + b) / h;
    return remap(img, [&](double x, double y) {
        return std::pair{(x + 0.5) * sx - 0.5 - l, (y + 0.5) * sy - 0.5 - t};
    });
}

Image warp(const Image& img, Rng& rng, double amplitude) {
    const double w = img.width(), h = img.height();
    const double ax = rng.uniform(-amplitude, amplitude) * w, ay = rng.uniform(-amplitude, amplitude) * h;
    const double fx = rng.uniform(0.5, 2.0), fy = rng.uniform(0.5, 2.0);
    const double px = rng.uniform(0, 2 * std::numbers::pi), py = rng.uniform(0, 2 * std::numbers::pi);
    return remap(img, [&](double x, double y) {
        return std::pair{x + ax * std::sin(2 * std::numbers::pi * fy * y / h + py),
                         y + ay * std::sin(2 * std::numbers::pi * fx * x / w + px)};
    });
}

Image piecewise_affine(const Image& img, Rng& rng, int grid, double jitter) {
    grid = std::max(grid, 1);
    const int n = grid + 1;
    const double w = img.width(), h = img.height();
    const double cw = (w - 1) / grid, ch = (h - 1) / grid;
    // Displacements of the control points; border points stay fixed.
    std::vector<double> dx(static_cast<std::size_t>(n * n), 0.0), dy(dx.size(), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double rx = rng.uniform(-jitter, jitter) * w, ry = rng.uniform(-jitter, jitter) * h;
            if (i == 0 || j == 0 || i == grid || j == grid) continue;
            dx[static_cast<std::size_t>(j * n + i)] = rx;
            dy[static_cast<std::size_t>(j * n + i)] = ry;
        }
    // Each grid cell splits into two triangles along its main diagonal; the
    // displacement is barycentric within a triangle, i.e. affine per triangle.
    return remap(img, [&](double x, double y) {
        const int i = std::min(static_cast<int>(x / cw), grid - 1);
        const int j = std::min(static_cast<int>(y / ch), grid - 1);
        const double u = x / cw - i, v = y / ch - j;
        auto at = [&](const std::vector<double>& d, int a, int b) { return d[static_cast<std::size_t>(b * n + a)]; };
        auto interp = [&](const std::vector<double>& d) {
            if (u >= v)  // triangle (i,j) (i+1,j) (i+1,j+1)
                return (1 - u) * at(d, i, j) + (u - v) * at(d, i + 1, j) + v * at(d, i + 1, j + 1);
            return (1 - v) * at(d, i, j) + (v - u) * at(d, i, j + 1) + u * at(d, i + 1, j + 1);
        };
        return std::pair{x + interp(dx), y + interp(dy)};
    });
}

}  // namespace

Image flip_lr(const Image& img) {
    Image out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
    return out;
}

Image flip_ud(const Image& img) {
    Image out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) out.at(x, img.height() - 1 - y, c) = img.at(x, y, c);
    return out;
}

Image adjust_brightness(const Image& img, double delta) {
    Image out = img;
    for (auto& v : out.data()) v = to_u8(v + delta);
    return out;
}

Image warp_affine(const Image& img, const Affine& m) {
    return remap(img, [&m](double x, double y) {
        return std::pair{m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5]};
    });
}

Pipeline::Pipeline(AugmentConfig config, std::uint64_t seed) : config_(config), rng_(seed) {
    for (double p : config_.probability)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("augmentation probability must be in [0, 1]");
}

Image Pipeline::apply(const Image& img) {
    Applied applied{};
    return apply(img, applied);
}

Image Pipeline::apply(const Image& input, Applied& applied) {
    const Ranges& r = config_.ranges;
    Image img = input;
    for (std::size_t k = 0; k < kTechniqueCount; ++k) {
        applied[k] = rng_.bernoulli(config_.probability[k]);
        if (!applied[k] || img.empty()) continue;
        switch (static_cast<Technique>(k)) {
            case Technique::FlipLR:
                img = flip_lr(img);
                break;
            case Technique::FlipUD:
                img = flip_ud(img);
                break;
            case Technique::Crop:
                img = crop(img, rng_, r.crop_fraction);
                break;
            case Technique::Pad:
                img = pad(img, rng_, r.pad_fraction);
                break;
            case Technique::Scale: {
                const double s = rng_.uniform(r.scale_min, r.scale_max);
                img = warp_affine(img, centered(img, 1 / s, 0, 0, 1 / s));
                break;
            }
            case Technique::Translate: {
                const double tx = rng_.uniform(-r.translate_fraction, r.translate_fraction) * img.width();
                const double ty = rng_.uniform(-r.translate_fraction, r.translate_fraction) * img.height();
                img = warp_affine(img, centered(img, 1, 0, 0, 1, -tx, -ty));
                break;
            }
            case Technique::Rotate: {
                const double a = rng_.uniform(-r.rotate_degrees, r.rotate_degrees) * std::numbers::pi / 180;
                img = warp_affine(img, centered(img, std::cos(a), std::sin(a), -std::sin(a), std::cos(a)));
                break;
            }
            case Technique::Shear: {
                const double a = rng_.uniform(-r.shear_degrees, r.shear_degrees) * std::numbers::pi / 180;
                img = warp_affine(img, centered(img, 1, -std::tan(a), 0, 1));
                break;
            }
            case Technique::Warp:
                img = warp(img, rng_, r.warp_fraction);
                break;
            case Technique::Brightness:
                img = adjust_brightness(img, rng_.uniform(-r.brightness_delta, r.brightness_delta));
                break;
            case Technique::PiecewiseAffine:
                img = piecewise_affine(img, rng_, r.piecewise_grid, r.piecewise_jitter);
                break;
        }
    }
    if (config_.output_width > 0 && config_.output_height > 0 && !img.empty())
        img = imaging::resize_bilinear(img, config_.output_width, config_.output_height);
    return img;
}

std::pair<Image, Image> Pipeline::apply_pair(const Image& a, const Image& b) {
    Image out_a = apply(a);
    Image out_b = apply(b);
    return {std::move(out_a), std::move(out_b)};
}

std::vector<Image> Pipeline::preview(const Image& img, int n) {
    if (n < 1) throw InvalidInput("preview: n must be >= 1");
    std::vector<Image> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(apply(img));
    return out;
}

}  // namespace siamcut::augment

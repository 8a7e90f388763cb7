// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "siamcut/augmentation.hpp"
#include "siamcut/random.hpp"

using namespace siamcut;
using namespace siamcut::augment;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    Image img(w, h, 3);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.index(256));
    return img;
}

AugmentConfig only(Technique t, double p = 1.0) {
    AugmentConfig cfg = AugmentConfig::uniform(0.0);
    cfg.probability[static_cast<std::size_t>(t)] = p;
    return cfg;
}

}  // namespace

TEST_CASE("disabled pipeline is the identity") {
    const Image img = random_image(23, 17, 1);
    Pipeline p(AugmentConfig::uniform(0.0), 5);
    for (int i = 0; i < 10; ++i) CHECK(p.apply(img) == img);
    const auto [a, b] = p.apply_pair(img, random_image(23, 17, 2));
    CHECK(a == img);
    CHECK(b == random_image(23, 17, 2));
    const auto pv = p.preview(img, 1);
    REQUIRE(pv.size() == 1);
    CHECK(pv[0] == img);
}

TEST_CASE("flips are involutions") {
    const Image img = random_image(12, 9, 3);
    CHECK(flip_lr(flip_lr(img)) == img);
    CHECK(flip_ud(flip_ud(img)) == img);
    CHECK(flip_lr(img).at(0, 0, 1) == img.at(11, 0, 1));
    Pipeline p(only(Technique::FlipLR), 9);
    CHECK(p.apply(p.apply(img)) == img);
}

TEST_CASE("technique probability and pair independence") {
    const Image img = random_image(8, 8, 4);
    Pipeline p(only(Technique::FlipLR, 0.5), 42);
    int fired = 0, both = 0, fired_a = 0, fired_b = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Applied applied{};
        p.apply(img, applied);
        fired += applied[0];
    }
    CHECK(std::abs(fired / double(n) - 0.5) < 0.02);

    // Pair calls draw independently: correlation of the two indicators ~ 0.
    const Image lr = flip_lr(img);
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = p.apply_pair(img, img);
        const bool fa = a == lr, fb = b == lr;
        fired_a += fa;
        fired_b += fb;
        both += fa && fb;
    }
    const double pa = fired_a / double(n), pb = fired_b / double(n), pab = both / double(n);
    const double corr = (pab - pa * pb) / std::sqrt(pa * (1 - pa) * pb * (1 - pb));
    CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("determinism and stream continuity") {
    const Image img = random_image(20, 20, 6);
    const auto cfg = AugmentConfig::uniform(0.5);
    Pipeline a(cfg, 77), b(cfg, 77);
    const auto four = a.preview(img, 4);
    auto first = b.preview(img, 2);
    const auto second = b.preview(img, 2);
    first.insert(first.end(), second.begin(), second.end());
    REQUIRE(first.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(four[i] == first[i]);
    for (const auto& v : four) {
        CHECK(v.width() == 20);
        CHECK(v.height() == 20);
    }
    Pipeline c(cfg, 78);
    bool any_diff = false;
    for (const auto& v : c.preview(img, 4)) any_diff |= !(v == four[0]);
    CHECK(any_diff);
}

TEST_CASE("every technique preserves dimensions") {
    const Image img = random_image(31, 22, 8);
    for (std::size_t t = 0; t < kTechniqueCount; ++t) {
        CAPTURE(technique_name(static_cast<Technique>(t)));
        Pipeline p(only(static_cast<Technique>(t)), 100 + t);
        for (int i = 0; i < 5; ++i) {
            Applied applied{};
            const Image out = p.apply(img, applied);
            CHECK(applied[t]);
            CHECK(out.width() == 31);
            CHECK(out.height() == 22);
            CHECK(out.channels() == 3);
        }
    }
}

TEST_CASE("output size resamples") {
    auto cfg = AugmentConfig::uniform(0.3);
    cfg.output_width = 16;
    cfg.output_height = 12;
    Pipeline p(cfg, 3);
    const Image out = p.apply(random_image(40, 30, 2));
    CHECK(out.width() == 16);
    CHECK(out.height() == 12);
}

TEST_CASE("brightness is a clamped per-pixel shift") {
    const Image img = random_image(10, 10, 10);
    const Image up = adjust_brightness(img, 30);
    const Image down = adjust_brightness(img, -30);
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(up.data()[i] == std::min(255, img.data()[i] + 30));
        CHECK(down.data()[i] == std::max(0, img.data()[i] - 30));
    }
}

TEST_CASE("identity affine map leaves the image unchanged") {
    const Image img = random_image(15, 11, 12);
    CHECK(warp_affine(img, {1, 0, 0, 0, 1, 0}) == img);
    // Integer translation with edge replication.
    const Image shifted = warp_affine(img, {1, 0, 2, 0, 1, 0});
    CHECK(shifted.at(0, 3, 1) == img.at(2, 3, 1));
    CHECK(shifted.at(14, 3, 1) == img.at(14, 3, 1));
}

// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>

#include "siamcut/backbone.hpp"
#include "siamcut/datakit.hpp"
#include "siamcut/errors.hpp"
#include "siamcut/imaging.hpp"
#include "siamcut/metrics.hpp"
#include "siamcut/siamese.hpp"
#include "siamcut/training.hpp"
#include "support/gradient_suite.hpp"
#include "support/oracles.hpp"

using namespace siamcut;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

backbone::BackboneConfig config(const char* name) {
    return backbone::BackboneConfig::load(std::string(SIAMCUT_CONFIG_DIR) + "/" + name);
}

// ---------------------------------------------------------------------------

Outcome published_metrics() {
    const auto r = metrics::macro_metrics({126, 2, 7, 121});
    const double acc = 0.9648, prec = 0.9656, rec = 0.96484, f1 = 0.96483;
    const double worst = std::max({std::abs(r.accuracy - acc), std::abs(r.precision - prec),
                                   std::abs(r.recall - rec), std::abs(r.f1 - f1)});
    return {worst <= 1e-4, fmt("acc %.6f prec %.6f rec %.6f f1 %.6f, max deviation %.2e", r.accuracy, r.precision,
                               r.recall, r.f1, worst)};
}

Outcome shape_contract() {
    const auto cfg = config("paper.cfg");
    const auto in = cfg.input;
    const auto out = backbone::output_shape(cfg);
    const bool ok = in == backbone::FeatureShape{299, 299, 3} && out == backbone::FeatureShape{10, 10, 2048};
    return {ok, backbone::to_string(in) + " -> " + backbone::to_string(out)};
}

Outcome parameter_contract() {
    const auto cfg = config("paper.cfg");
    const auto backbone_params = backbone::param_count(cfg);
    const auto head = siamese::head_param_count(backbone::output_shape(cfg).size());
    const auto total = backbone_params + head;
    const std::size_t expected_head = 204800 * 64 + 64 + 64 * 32 + 32 + 32 + 1;
    const double rel = (static_cast<double>(total) - 34e6) / 34e6;
    return {std::abs(rel) <= 0.05 && head == expected_head && head == 13109377,
            fmt("backbone %zu + head %zu = %zu (%+.2f%% vs 34e6)", backbone_params, head, total, 100 * rel)};
}

Outcome gradient_suite() {
    double worst32 = 0, worst64 = 0;
    std::string worst_name;
    bool ok = true;
    for (const auto& c : testsupport::gradient_cases(true)) {
        const auto a = c.run_f32();
        const auto b = c.run_f64();
        const bool case_ok = a.relative_error < 1e-3 && b.relative_error < 1e-6 && b.analytic_norm > 0;
        if (!case_ok) {
            ok = false;
            std::printf("      %s: f32 %.2e f64 %.2e\n", c.name.c_str(), a.relative_error, b.relative_error);
        }
        if (b.relative_error > worst64) worst_name = c.name;
        worst32 = std::max(worst32, a.relative_error);
        worst64 = std::max(worst64, b.relative_error);
    }
    return {ok, fmt("worst f32 %.2e (< 1e-3), worst f64 %.2e (< 1e-6, %s)", worst32, worst64, worst_name.c_str())};
}

Outcome oracle_equivalence() {
    Rng rng(5150);
    int otsu_ok = 0, otsu_n = 0;
    while (otsu_n < 1000) {
        std::array<std::uint64_t, 256> h{};
        const auto bins = 2 + rng.index(otsu_n % 4 == 0 ? 4 : 254);
        const auto mass = otsu_n % 2 ? 10 : 100000;
        for (std::uint64_t k = 0; k < bins; ++k) h[rng.index(256)] += 1 + rng.index(mass);
        int populated = 0;
        for (auto v : h) populated += v != 0;
        if (populated < 2) continue;
        ++otsu_n;
        otsu_ok += imaging::otsu_threshold(h) == oracle::otsu(h);
    }
    int morph_ok = 0;
    const int morph_n = 200;
    for (int i = 0; i < morph_n; ++i) {
        const int w = 1 + static_cast<int>(rng.index(64)), h = 1 + static_cast<int>(rng.index(64));
        const double density = rng.uniform(0.1, 0.9);
        BinaryMask m(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) m.set(x, y, rng.bernoulli(density));
        const imaging::StructuringElement se(i % 3 == 2 ? imaging::ElementShape::Ellipse
                                                        : imaging::ElementShape::Square,
                                             1 + 2 * static_cast<int>(rng.index(3)));
        morph_ok += imaging::morph_open(m, se) == oracle::open(m, se) &&
                    imaging::morph_close(m, se) == oracle::close(m, se);
    }
    return {otsu_ok == otsu_n && morph_ok == morph_n,
            fmt("otsu %d/%d exact, open+close %d/%d exact", otsu_ok, otsu_n, morph_ok, morph_n)};
}

Outcome sampler_statistics() {
    training::DatasetPools pools;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 4; ++i) {
            pools.raw[c].push_back(Image(1, 1, 3, 0));
            pools.segmented[c].push_back(Image(1, 1, 3, 1));
        }
    Rng rng = substream(2026, "sampler");
    const int n = 10000;
    int same = 0, segmented = 0, consistent = 0;
    for (int i = 0; i < n; ++i) {
        const auto s = training::sample_pair(pools, rng);
        same += s.label;
        segmented += s.segmented_a + s.segmented_b;
        consistent += (s.label == 1) == (s.class_a == s.class_b);
    }
    const double fs = segmented / (2.0 * n), fl = same / double(n);
    return {std::abs(fs - 2.0 / 3.0) <= 0.02 && std::abs(fl - 0.5) <= 0.02 && consistent == n,
            fmt("segmented fraction %.4f, same-class fraction %.4f over %d pairs", fs, fl, n)};
}

Outcome desk_training() {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / "siamcut_acceptance_data";
    fs::remove_all(dir);
    auto spec = data::SyntheticSpec::load(std::string(SIAMCUT_CONFIG_DIR) + "/synth.cfg");
    if (spec.counts[0] < 200 || spec.counts[1] < 200) return {false, "synthetic spec has fewer than 200 images per class"};
    const auto manifest = data::generate_synthetic(spec, dir);

    training::TrainConfig tc;
    tc.epochs = 20;
    tc.steps_per_epoch = 50;
    tc.val_pairs = 128;
    tc.seed = 1;
    const auto parts = data::split_manifest(manifest, {}, tc.seed);
    const auto train_pools = data::prepare_pools(parts[0]);
    const auto val_pools = data::prepare_pools(parts[1]);
    const auto test_pools = data::prepare_pools(parts[2]);

    const auto cfg = config("desk.cfg");
    Rng init = substream(tc.seed, "init");
    const auto result =
        training::train(siamese::Model<float>::build(cfg, init), train_pools.pools, val_pools.pools, tc);
    const auto test_pairs = training::make_pairs(test_pools.pools, 256, substream_seed(tc.seed, "test"), cfg);
    const auto ev = training::evaluate(result.best, test_pairs);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fs::remove_all(dir);
    return {ev.accuracy >= 0.90 && seconds <= 600.0,
            fmt("%zu+%zu images, %zu train / %zu test; held-out pair accuracy %.4f after %zu epochs in %.0f s",
                manifest.count(0), manifest.count(1), parts[0].records.size(), parts[2].records.size(), ev.accuracy,
                tc.epochs, seconds)};
}

Outcome segmentation_efficacy() {
    const auto spec = data::SyntheticSpec::load(std::string(SIAMCUT_CONFIG_DIR) + "/synth.cfg");
    std::size_t good = 0;
    double mean_iou = 0;
    const std::size_t n = spec.counts[0];
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = data::render_synthetic(spec, 0, i);
        double v = 0;
        try {
            v = iou(imaging::segment_cut(s.image).mask, s.truth);
        } catch (const DegenerateHistogram&) {
        }
        mean_iou += v;
        good += v >= 0.5;
    }
    const double frac = static_cast<double>(good) / static_cast<double>(n);
    return {frac >= 0.8, fmt("IoU >= 0.5 on %zu/%zu class-A images (%.1f%%), mean IoU %.3f", good, n, 100 * frac,
                             mean_iou / static_cast<double>(n))};
}

Outcome determinism() {
    const auto cfg = config("desk.cfg");
    data::SyntheticSpec spec;
    spec.seed = 99;
    training::DatasetPools pools;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 8; ++i) {
            const Image img = data::render_synthetic(spec, c, i).image;
            pools.raw[c].push_back(img);
            pools.segmented[c].push_back(imaging::segment_cut(img).masked);
        }
    training::TrainConfig tc;
    tc.epochs = 3;
    tc.steps_per_epoch = 4;
    tc.val_pairs = 16;
    tc.seed = 7;
    auto run = [&] {
        Rng init = substream(tc.seed, "init");
        return training::train(siamese::Model<float>::build(cfg, init), pools, pools, tc);
    };
    const auto a = run(), b = run();
    const bool same_history = a.history.to_csv() == b.history.to_csv();

    const fs::path dir = fs::temp_directory_path() / "siamcut_acceptance_ckpt";
    fs::create_directories(dir);
    siamese::save(dir / "first.ckpt", a.last, &a.state);
    const auto loaded = siamese::load(dir / "first.ckpt");
    siamese::save(dir / "second.ckpt", loaded.model, loaded.state ? &*loaded.state : nullptr);
    const bool same_bytes = read_text_file(dir / "first.ckpt") == read_text_file(dir / "second.ckpt");
    const auto size = fs::file_size(dir / "first.ckpt");
    fs::remove_all(dir);
    return {same_history && same_bytes,
            fmt("history CSVs %s (%zu rows); checkpoint save-load-save %s (%ju bytes)",
                same_history ? "identical" : "DIFFER", a.history.epochs.size(),
                same_bytes ? "byte-identical" : "DIFFERS", static_cast<std::uintmax_t>(size))};
}

Outcome loss_values() {
    const double a = training::bce_loss(0.5, 1), b = training::bce_loss(0.9, 1);
    ad::Tape<double> t;
    const double ta = t.item(ad::bce_loss(t, t.constant({1}, {0.5}), 0.0));
    const double tb = t.item(ad::bce_loss(t, t.constant({1}, {0.9}), 1.0));
    const bool ok = std::abs(a - 0.693147) <= 1e-6 && std::abs(b - 0.105361) <= 1e-6 &&
                    std::abs(ta - 0.693147) <= 1e-6 && std::abs(tb - 0.105361) <= 1e-6;
    return {ok, fmt("bce(0.5) = %.7f, bce(0.9, 1) = %.7f (tape: %.7f, %.7f)", a, b, ta, tb)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"published 256-pair metrics", published_metrics},
        {"paper-scale shape contract", shape_contract},
        {"paper-scale parameter contract", parameter_contract},
        {"finite-difference gradient suite", gradient_suite},
        {"otsu and morphology oracles", oracle_equivalence},
        {"pair sampler statistics", sampler_statistics},
        {"desk-scale training", desk_training},
        {"segmentation efficacy", segmentation_efficacy},
        {"determinism and persistence", determinism},
        {"loss values", loss_values},
    };
    int failed = 0, index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("[%s] %2d %-34s %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}

// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "siamcut/datakit.hpp"
#include "siamcut/errors.hpp"
#include "siamcut/training.hpp"
#include "support/gradient_suite.hpp"

using namespace siamcut;
using namespace siamcut::training;

namespace {

// Pools whose images encode (class, segmented) in their first byte.
DatasetPools tagged_pools(std::size_t per_pool) {
    DatasetPools p;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per_pool; ++i) {
            p.raw[c].push_back(Image(2, 2, 3, static_cast<std::uint8_t>(10 * c)));
            p.segmented[c].push_back(Image(2, 2, 3, static_cast<std::uint8_t>(10 * c + 1)));
        }
    return p;
}

DatasetPools synthetic_pools(std::size_t per_class, std::uint64_t seed) {
    data::SyntheticSpec spec;
    spec.seed = seed;
    DatasetPools p;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            const Image img = data::render_synthetic(spec, c, i).image;
            p.segmented[c].push_back(imaging::segment_cut(img).masked);
            p.raw[c].push_back(img);
        }
    return p;
}

}  // namespace

TEST_CASE("split counts") {
    auto counts = [](std::size_t n, int cls = 0) {
        std::vector<int> classes(n, cls);
        const auto s = split_dataset(classes, {}, 1);
        return std::array<std::size_t, 3>{s.train.size(), s.val.size(), s.test.size()};
    };
    CHECK(counts(100) == std::array<std::size_t, 3>{70, 15, 15});
    CHECK(counts(30) == std::array<std::size_t, 3>{21, 4, 5});
    CHECK(counts(737) == std::array<std::size_t, 3>{515, 110, 112});
    CHECK_THROWS_AS(counts(2), InvalidInput);
    CHECK_THROWS_AS(split_dataset(std::vector<int>(10, 0), {0.5, 0.5, 0.5}, 1), InvalidInput);
}

TEST_CASE("split is stratified, disjoint, exhaustive and seeded") {
    std::vector<int> classes;
    for (int i = 0; i < 737; ++i) classes.push_back(0);
    for (int i = 0; i < 30; ++i) classes.push_back(1);
    const auto s = split_dataset(classes, {}, 9);
    std::set<std::size_t> all;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
        bool has_minority = false;
        for (auto i : *part) {
            CHECK(all.insert(i).second);
            has_minority |= classes[i] == 1;
        }
        CHECK(has_minority);
    }
    CHECK(all.size() == classes.size());
    const auto again = split_dataset(classes, {}, 9);
    CHECK(again.train == s.train);
    CHECK(split_dataset(classes, {}, 10).train != s.train);
}

TEST_CASE("sampler statistics") {
    const auto pools = tagged_pools(5);
    Rng rng(21);
    int same = 0, segmented = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_pair(pools, rng);
        CHECK((s.label == 1) == (s.class_a == s.class_b));
        CHECK(s.a.at(0, 0) / 10 == s.class_a);
        CHECK(s.b.at(0, 0) / 10 == s.class_b);
        CHECK((s.a.at(0, 0) % 10 == 1) == s.segmented_a);
        same += s.label;
        segmented += s.segmented_a + s.segmented_b;
    }
    CHECK(std::abs(same / double(n) - 0.5) < 0.02);
    CHECK(std::abs(segmented / double(2 * n) - 2.0 / 3.0) < 0.02);
}

TEST_CASE("sampler errors") {
    DatasetPools empty;
    Rng rng(1);
    CHECK_THROWS_AS(sample_pair(empty, rng), SamplingError);
    auto p = tagged_pools(1);
    p.segmented_probability = 1.5;
    CHECK_THROWS_AS(sample_pair(p, rng), InvalidInput);
}

TEST_CASE("scalar bce") {
    CHECK(bce_loss(0.5, 1) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(bce_loss(0.5, 0) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(bce_loss(0.9, 1) == doctest::Approx(0.105361).epsilon(1e-6));
    CHECK(bce_loss(1.0, 1) < 1e-6);
    CHECK(std::isfinite(bce_loss(1.0, 0)));
}

TEST_CASE("train config keys and validation") {
    TrainConfig c;
    c.set("lr", "0.001");
    c.set("decay_every", "step");
    c.set("batch_size", "4");
    CHECK(c.lr == 0.001);
    CHECK(c.decay_every == DecayEvery::Step);
    CHECK_THROWS_AS(c.set("learning_rate", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("epochs", "many"), ConfigError);
    c.steps_per_epoch = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    TrainConfig d;
    TrainConfig e;
    const auto text = d.to_text();
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl - pos);
        const auto eq = line.find(" = ");
        e.set(line.substr(0, eq), line.substr(eq + 3));
        pos = nl + 1;
    }
    CHECK(e.to_text() == text);
    CHECK(TrainConfig::keys().size() == 12);
}

TEST_CASE("evaluate threshold and accuracy") {
    const auto cfg = testsupport::desk_config();
    Rng rng(3);
    const auto model = siamese::Model<float>::build(cfg, rng);
    const auto a = oracle::random_tensor({3, 64, 64}, rng, 0, 1).cast<float>();
    // Identical inputs give exactly 0.5, which counts as "same".
    std::vector<PreparedPair> pairs = {{a, a, 1}, {a, a, 1}};
    const auto ev = evaluate(model, pairs);
    CHECK(ev.accuracy == 1.0);
    CHECK(ev.predictions == std::vector<int>{1, 1});
    CHECK(ev.loss == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(evaluate(model, std::vector<PreparedPair>{}), InvalidInput);
}

TEST_CASE("lr zero step leaves the model bitwise unchanged") {
    const auto cfg = testsupport::desk_config();
    Rng rng(4);
    auto model = siamese::Model<float>::build(cfg, rng);
    const auto before = model;
    const auto pools = synthetic_pools(3, 1);
    const auto batch = make_pairs(pools, 4, 2, cfg);
    ad::AdamState<float> adam;
    adam.lr = 0;
    train_step(model, adam, batch, 1e-4);
    for (std::size_t i = 0; i < model.params().size(); ++i) CHECK(model.params()[i].values == before.params()[i].values);
}

TEST_CASE("loss on a frozen batch decreases") {
    const auto cfg = testsupport::desk_config();
    Rng rng(5);
    auto model = siamese::Model<float>::build(cfg, rng);
    const auto pools = synthetic_pools(4, 2);
    const auto batch = make_pairs(pools, 8, 3, cfg);
    ad::AdamState<float> adam;
    adam.lr = 1e-3;
    std::vector<double> losses;
    for (int i = 0; i < 50; ++i) losses.push_back(train_step(model, adam, batch, 1e-4));
    int increases = 0;
    for (std::size_t i = 1; i < losses.size(); ++i) increases += losses[i] > losses[i - 1];
    CHECK(increases <= 5);
    CHECK(losses.back() < losses.front());
}

TEST_CASE("training loop: history, lr schedule, determinism and resume") {
    const auto cfg = testsupport::desk_config();
    const auto pools = synthetic_pools(6, 3);
    TrainConfig tc;
    tc.epochs = 3;
    tc.steps_per_epoch = 2;
    tc.batch_size = 2;
    tc.val_pairs = 8;
    tc.seed = 17;
    auto fresh = [&] {
        Rng init = substream(tc.seed, "init");
        return siamese::Model<float>::build(cfg, init);
    };

    std::vector<std::size_t> seen;
    const auto r1 = train(fresh(), pools, pools, tc, nullptr, [&](const EpochRecord& e) { seen.push_back(e.epoch); });
    CHECK(r1.history.epochs.size() == 3);
    CHECK(seen == std::vector<std::size_t>{0, 1, 2});
    CHECK(r1.state.epoch == 3);
    CHECK(r1.state.adam.lr == doctest::Approx(1e-4 * std::pow(0.99, 3)).epsilon(1e-12));

    const auto r2 = train(fresh(), pools, pools, tc);
    CHECK(r2.history.to_csv() == r1.history.to_csv());
    CHECK(siamese::serialize(r2.last, &r2.state) == siamese::serialize(r1.last, &r1.state));

    // Two epochs, then resume for the third: same final weights and rows.
    TrainConfig first = tc;
    first.epochs = 2;
    const auto a = train(fresh(), pools, pools, first);
    const auto b = train(a.last, pools, pools, tc, &a.state);
    REQUIRE(b.history.epochs.size() == 1);
    CHECK(b.history.epochs[0].epoch == 2);
    CHECK(siamese::serialize(b.last, &b.state) == siamese::serialize(r1.last, &r1.state));
    History joined = a.history;
    joined.epochs.push_back(b.history.epochs[0]);
    CHECK(joined.to_csv() == r1.history.to_csv());

    TrainConfig bad = tc;
    bad.steps_per_epoch = 0;
    CHECK_THROWS_AS(train(fresh(), pools, pools, bad), ConfigError);
}

TEST_CASE("non-finite loss aborts with diagnostics") {
    const auto cfg = testsupport::desk_config();
    Rng rng(6);
    auto model = siamese::Model<float>::build(cfg, rng);
    for (auto& v : model.param("head.dense2.bias").values) v = std::numeric_limits<float>::quiet_NaN();
    const auto pools = synthetic_pools(2, 4);
    TrainConfig tc;
    tc.epochs = 1;
    tc.steps_per_epoch = 1;
    tc.batch_size = 2;
    tc.val_pairs = 2;
    CHECK_THROWS_AS(train(model, pools, pools, tc), NumericalError);
}

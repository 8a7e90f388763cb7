// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "siamcut/errors.hpp"
#include "siamcut/siamese.hpp"
#include "support/gradient_suite.hpp"

using namespace siamcut;
using namespace siamcut::siamese;

namespace {

Tensor<float> random_input(const backbone::BackboneConfig& cfg, Rng& rng) {
    return oracle::random_tensor({3, cfg.input.height, cfg.input.width}, rng, 0, 1).cast<float>();
}

std::vector<std::uint8_t> bytes_of(const Model<float>& m, const TrainingState* s = nullptr) { return serialize(m, s); }

}  // namespace

TEST_CASE("head layout and initialisation") {
    const auto cfg = testsupport::desk_config();
    Rng r1(10), r2(10);
    const auto m = Model<float>::build(cfg, r1);
    CHECK(kHeadWidths == std::array<std::size_t, 3>{64, 32, 1});
    CHECK(m.param("head.dense0.kernel").shape == Shape{64, 2048});
    CHECK(m.param("head.dense1.kernel").shape == Shape{32, 64});
    CHECK(m.param("head.dense2.kernel").shape == Shape{1, 32});
    for (float v : m.param("head.dense1.kernel").values) CHECK(std::abs(v) <= 0.25f);
    for (float v : m.param("head.dense1.bias").values) CHECK(v == 0.0f);
    CHECK(head_param_count(204800) == 13109377);
    CHECK(m.param_count() == backbone::param_count(cfg) + head_param_count(2048));

    const auto m2 = Model<float>::build(cfg, r2);
    for (std::size_t i = 0; i < m.params().size(); ++i) CHECK(m.params()[i].values == m2.params()[i].values);
    CHECK_THROWS(m.param("nope"));
}

TEST_CASE("forward_pair contracts") {
    const auto cfg = testsupport::desk_config();
    Rng rng(11);
    const auto m = Model<float>::build(cfg, rng);
    const auto a = random_input(cfg, rng), b = random_input(cfg, rng);
    // Zero head biases and identical inputs: the head sees the zero vector.
    CHECK(forward_pair(m, a, a) == 0.5f);
    CHECK(forward_pair(m, a, a) == forward_pair(m, b, b));
    for (int i = 0; i < 20; ++i) {
        const auto x = oracle::random_tensor({3, 64, 64}, rng, -3, 3).cast<float>();
        const float p = forward_pair(m, x, a);
        REQUIRE(p > 0.0f);
        REQUIRE(p < 1.0f);
    }
    CHECK_THROWS_AS(forward_pair(m, a, Tensor<float>({3, 32, 32})), ShapeError);
}

TEST_CASE("output stays strictly inside (0, 1) on many cheap inputs") {
    // A tiny backbone keeps 1000 evaluations fast.
    const auto cfg = backbone::BackboneConfig::parse("input = 8, 8, 3\n[block]\nkind = conv\nstride = 2\nchannels = 4\n");
    Rng rng(12);
    const auto m = Model<float>::build(cfg, rng);
    for (int i = 0; i < 1000; ++i) {
        const auto a = oracle::random_tensor({3, 8, 8}, rng, -5, 5).cast<float>();
        const auto b = oracle::random_tensor({3, 8, 8}, rng, -5, 5).cast<float>();
        const float p = forward_pair(m, a, b);
        REQUIRE(p > 0.0f);
        REQUIRE(p < 1.0f);
    }
}

TEST_CASE("shared weights: both twins are one function") {
    const auto cfg = testsupport::desk_config();
    Rng rng(13);
    auto m = Model<float>::build(cfg, rng);
    const auto a = random_input(cfg, rng);
    ad::Tape<float> t;
    const auto params = bind_constants(t, m);
    const auto fa1 = features(t, m, params, t.constant(a));
    const auto fa2 = features(t, m, params, t.constant(a));
    CHECK(std::equal(t.value(fa1).begin(), t.value(fa1).end(), t.value(fa2).begin()));
}

TEST_CASE("backbone gradient sums both twin contributions") {
    // d loss / d w where the same w feeds both branches equals the finite
    // difference of the whole pair loss; this is what the end-to-end check
    // measures, restricted here to backbone tensors.
    const auto cfg = backbone::BackboneConfig::parse(
        "input = 10, 10, 3\n[block]\nkind = conv\nstride = 2\nchannels = 3\n[block]\nkind = sepconv\nchannels = 4\n"
        "stride = 2\nresidual = true\n");
    Rng rng(14);
    const auto model = Model<float>::build(cfg, rng);
    std::vector<Tensor<double>> inputs = {oracle::random_tensor({3, 10, 10}, rng, 0, 1),
                                          oracle::random_tensor({3, 10, 10}, rng, 0, 1)};
    for (const auto& p : model.params()) inputs.push_back(p.cast<double>());
    const auto mf = Model<float>::zeros(cfg);
    const auto md = Model<double>::zeros(cfg);
    auto build = [&](auto& t, std::span<const ad::Var> in) {
        using T = testsupport::tape_value_t<std::remove_cvref_t<decltype(t)>>;
        ad::Var p;
        if constexpr (std::is_same_v<T, float>)
            p = pair_probability(t, mf, in.subspan(2), in[0], in[1]);
        else
            p = pair_probability(t, md, in.subspan(2), in[0], in[1]);
        return ad::bce_loss(t, p, T(1));
    };
    const auto r = oracle::check_gradients<double>(build, inputs, 3);
    CHECK(r.relative_error < 1e-6);
}

TEST_CASE("checkpoint round trip and errors") {
    const auto cfg = testsupport::desk_config();
    Rng rng(15);
    const auto m = Model<float>::build(cfg, rng);
    TrainingState st;
    st.epoch = 7;
    st.adam.lr = 3e-5;
    st.adam.step = 700;
    st.adam.m.assign(m.params().size(), {});
    st.adam.v.assign(m.params().size(), {});
    for (std::size_t i = 0; i < m.params().size(); ++i) {
        st.adam.m[i].assign(m.params()[i].size(), 0.25f);
        st.adam.v[i].assign(m.params()[i].size(), 0.5f);
    }

    const auto bytes = bytes_of(m, &st);
    const auto ck = deserialize(bytes);
    REQUIRE(ck.state.has_value());
    CHECK(ck.state->epoch == 7);
    CHECK(ck.state->adam.step == 700);
    CHECK(ck.state->adam.lr == 3e-5);
    CHECK(bytes_of(ck.model, &*ck.state) == bytes);
    for (std::size_t i = 0; i < m.params().size(); ++i) CHECK(ck.model.params()[i].values == m.params()[i].values);

    const auto dir = std::filesystem::temp_directory_path() / "siamcut_ckpt_test";
    std::filesystem::create_directories(dir);
    save(dir / "a.ckpt", m);
    save(dir / "b.ckpt", load(dir / "a.ckpt").model);
    CHECK(read_text_file(dir / "a.ckpt") == read_text_file(dir / "b.ckpt"));
    std::filesystem::remove_all(dir);

    SUBCASE("bad magic") {
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(deserialize(bad), BadMagic);
    }
    SUBCASE("truncated") {
        auto cut = bytes;
        cut.resize(cut.size() / 2);
        CHECK_THROWS_AS(deserialize(cut), TruncatedFile);
    }
    SUBCASE("tensor count mismatch") {
        // Same backbone text, but the file claims one tensor more than the config allocates.
        auto plain = bytes_of(m);
        const std::size_t text_len = plain[5] | plain[6] << 8 | plain[7] << 16 | plain[8] << 24;
        const std::size_t at = 9 + text_len;
        plain[at] += 1;
        CHECK_THROWS_AS(deserialize(plain), CheckpointShapeMismatch);
    }
    SUBCASE("trailing bytes") {
        auto extra = bytes;
        extra.push_back(0);
        CHECK_THROWS_AS(deserialize(extra), DataError);
    }
}

TEST_CASE("network input conversion") {
    Image img(4, 2, 3, 0);
    img.at(0, 0, 0) = 255;
    const auto t = to_network_input(img, 2, 4);
    CHECK(t.shape == Shape{3, 2, 4});
    CHECK(t.values[0] == doctest::Approx(76.0f / 255.0f));
    CHECK(t.values[8 + 1] == doctest::Approx(128.0f / 255.0f));
    const auto resized = to_network_input(img, 8, 8);
    CHECK(resized.shape == Shape{3, 8, 8});
}

// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "siamcut/errors.hpp"
#include "siamcut/metrics.hpp"
#include "support/oracles.hpp"

using namespace siamcut;
using namespace siamcut::metrics;

TEST_CASE("confusion counts") {
    CHECK(confusion(std::vector<int>{1, 0}, std::vector<int>{1, 0}) == ConfusionMatrix{1, 0, 0, 1});
    CHECK(confusion(std::vector<int>{1, 1, 1}, std::vector<int>{0, 0, 0}) == ConfusionMatrix{0, 3, 0, 0});
    CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<int>{1, 0}), InvalidInput);
    CHECK_THROWS_AS(confusion(std::vector<int>{2}, std::vector<int>{1}), InvalidInput);
}

TEST_CASE("published evaluation batch") {
    const ConfusionMatrix cm{126, 2, 7, 121};
    CHECK(cm.total() == 256);
    const auto r = macro_metrics(cm);
    CHECK(std::abs(r.accuracy - 0.96484) < 1e-4);
    CHECK(std::abs(r.precision - 0.96556) < 1e-4);
    CHECK(std::abs(r.recall - 0.96484) < 1e-4);
    CHECK(std::abs(r.f1 - 0.96483) < 1e-4);
    CHECK(r.recall == r.accuracy);
}

TEST_CASE("degenerate matrices") {
    const auto perfect = macro_metrics({10, 0, 0, 10});
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK_FALSE(perfect.degenerate_precision);

    const auto r = macro_metrics({0, 0, 10, 0});
    CHECK(r.accuracy == 0.0);
    CHECK(r.degenerate_precision);
    CHECK_THROWS_AS(macro_metrics({}), InvalidInput);
}

TEST_CASE("agreement with the per-class oracle, scale invariance") {
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        ConfusionMatrix cm{rng.index(40), rng.index(40), rng.index(40), rng.index(40)};
        if (cm.total() == 0) continue;
        const auto r = macro_metrics(cm);
        const auto o = oracle::metrics(cm);
        REQUIRE(r.accuracy == doctest::Approx(o.accuracy).epsilon(1e-12));
        REQUIRE(r.precision == doctest::Approx(o.precision).epsilon(1e-12));
        REQUIRE(r.recall == doctest::Approx(o.recall).epsilon(1e-12));
        REQUIRE(r.f1 == doctest::Approx(o.f1).epsilon(1e-12));
        const std::uint64_t k = 1 + rng.index(5);
        const auto s = macro_metrics({cm.tn * k, cm.fp * k, cm.fn * k, cm.tp * k});
        CHECK(s.f1 == doctest::Approx(r.f1).epsilon(1e-12));
        CHECK(s.precision == doctest::Approx(r.precision).epsilon(1e-12));
    }
}

TEST_CASE("report formats") {
    const ConfusionMatrix cm{126, 2, 7, 121};
    auto r = macro_metrics(cm);
    r.loss = 0.1;
    const auto csv = to_csv(cm, r);
    CHECK(csv.rfind("metric,value\n", 0) == 0);
    CHECK(csv.find("true_negative,126\n") != std::string::npos);
    CHECK(csv.find("true_positive,121\n") != std::string::npos);
    CHECK(csv.find("precision,0.965") != std::string::npos);
    const auto table = to_table(cm, r);
    CHECK(table.find("False negative   7") != std::string::npos);
}

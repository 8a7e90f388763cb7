// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace siamcut::metrics {

/// Binary confusion counts; the positive class (label 1) is "same pair".
struct ConfusionMatrix {
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tp = 0;

    std::uint64_t total() const noexcept { return tn + fp + fn + tp; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

struct ClassScores {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

/// Per-class precision/recall/F1 for classes 0 and 1, averaged without
/// weights. Any 0/0 is reported as 0 and raises the matching flag.
struct MetricsReport {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double loss = 0;  // filled by the caller when known
    ClassScores negative;
    ClassScores positive;
    bool degenerate_precision = false;
    bool degenerate_recall = false;
    bool degenerate_f1 = false;
};

MetricsReport macro_metrics(const ConfusionMatrix& cm);

/// `metric,value` rows, confusion counts included.
std::string to_csv(const ConfusionMatrix& cm, const MetricsReport& report);
/// Aligned two-column table for terminals.
std::string to_table(const ConfusionMatrix& cm, const MetricsReport& report);

}  // namespace siamcut::metrics

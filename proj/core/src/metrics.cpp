// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/metrics.hpp"

#include <cstdio>

#include "siamcut/errors.hpp"

namespace siamcut::metrics {

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size())
        throw InvalidInput("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                           std::to_string(labels.size()) + " labels");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i], p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1)) throw InvalidInput("confusion: values must be 0 or 1");
        if (y == 1)
            ++(p == 1 ? cm.tp : cm.fn);
        else
            ++(p == 1 ? cm.fp : cm.tn);
    }
    return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

ClassScores class_scores(std::uint64_t hit, std::uint64_t false_alarm, std::uint64_t miss, MetricsReport& r) {
    ClassScores s;
    s.precision = ratio(hit, hit + false_alarm, r.degenerate_precision);
    s.recall = ratio(hit, hit + miss, r.degenerate_recall);
    if (s.precision + s.recall == 0.0) {
        r.degenerate_f1 = true;
        s.f1 = 0.0;
    } else {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    }
    return s;
}

}  // namespace

MetricsReport macro_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw InvalidInput("macro_metrics: empty confusion matrix");
    MetricsReport r;
    r.accuracy = static_cast<double>(cm.tn + cm.tp) / static_cast<double>(cm.total());
    // For class 0 the roles flip: TN are hits, FN false alarms, FP misses.
    r.negative = class_scores(cm.tn, cm.fn, cm.fp, r);
    r.positive = class_scores(cm.tp, cm.fp, cm.fn, r);
    r.precision = 0.5 * (r.negative.precision + r.positive.precision);
    r.recall = 0.5 * (r.negative.recall + r.positive.recall);
    r.f1 = 0.5 * (r.negative.f1 + r.positive.f1);
    return r;
}

std::string to_csv(const ConfusionMatrix& cm, const MetricsReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "metric,value\naccuracy,%.6f\nloss,%.6f\nprecision,%.6f\nrecall,%.6f\nf1,%.6f\n"
                  "true_negative,%llu\nfalse_positive,%llu\nfalse_negative,%llu\ntrue_positive,%llu\n",
                  r.accuracy, r.loss, r.precision, r.recall, r.f1, static_cast<unsigned long long>(cm.tn),
                  static_cast<unsigned long long>(cm.fp), static_cast<unsigned long long>(cm.fn),
                  static_cast<unsigned long long>(cm.tp));
    return buf;
}

std::string to_table(const ConfusionMatrix& cm, const MetricsReport& r) {
    char buf[640];
    std::snprintf(buf, sizeof(buf),
                  "Metric           Value\n"
                  "Accuracy         %.5f\n"
                  "Loss             %.5f\n"
                  "Precision        %.5f\n"
                  "Recall           %.5f\n"
                  "F1 score         %.5f\n"
                  "True negative    %llu\n"
                  "False positive   %llu\n"
                  "False negative   %llu\n"
                  "True positive    %llu\n",
                  r.accuracy, r.loss, r.precision, r.recall, r.f1, static_cast<unsigned long long>(cm.tn),
                  static_cast<unsigned long long>(cm.fp), static_cast<unsigned long long>(cm.fn),
                  static_cast<unsigned long long>(cm.tp));
    return buf;
}

}  // namespace siamcut::metrics

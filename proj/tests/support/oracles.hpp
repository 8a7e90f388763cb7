// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls the code under test except to build graphs.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "siamcut/image.hpp"
#include "siamcut/imaging.hpp"
#include "siamcut/metrics.hpp"
#include "siamcut/ops.hpp"
#include "siamcut/random.hpp"
#include "siamcut/tape.hpp"

namespace siamcut::oracle {

// ---------------------------------------------------------------------------
// Otsu: exhaustive search over every threshold with exact rationals.

inline int otsu(const std::array<std::uint64_t, 256>& hist) {
    using boost::multiprecision::cpp_rational;
    std::uint64_t total = 0;
    for (auto h : hist) total += h;
    std::optional<cpp_rational> best;
    int best_t = -1;
    for (int t = 0; t < 256; ++t) {
        cpp_rational n0 = 0, s0 = 0, n1 = 0, s1 = 0;
        for (int i = 0; i < 256; ++i) {
            if (i <= t) {
                n0 += hist[i];
                s0 += cpp_rational(hist[i]) * i;
            } else {
                n1 += hist[i];
                s1 += cpp_rational(hist[i]) * i;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const cpp_rational w0 = n0 / total, w1 = n1 / total;
        const cpp_rational diff = s0 / n0 - s1 / n1;
        const cpp_rational var = w0 * w1 * diff * diff;
        if (!best || var > *best) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

// ---------------------------------------------------------------------------
// Morphology from the set definitions. Only translates anchored inside the
// image are considered and pixels outside the image are ignored.

// p is in the opening iff some translate B_q with q in the image contains p
// and every in-image pixel of B_q is foreground.
inline BinaryMask open(const BinaryMask& a, const imaging::StructuringElement& se) {
    const int w = a.width(), h = a.height(), r = se.radius();
    auto fits = [&](int qx, int qy) {
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                if (!se.contains(dx, dy)) continue;
                const int x = qx + dx, y = qy + dy;
                if (x >= 0 && y >= 0 && x < w && y < h && !a.at(x, y)) return false;
            }
        return true;
    };
    BinaryMask out(w, h);
    for (int qy = 0; qy < h; ++qy)
        for (int qx = 0; qx < w; ++qx) {
            if (!fits(qx, qy)) continue;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const int x = qx + dx, y = qy + dy;
                    if (se.contains(dx, dy) && x >= 0 && y >= 0 && x < w && y < h) out.set(x, y, true);
                }
        }
    return out;
}

// p is in the closing iff every translate B_q with q in the image that
// contains p also hits the foreground.
inline BinaryMask close(const BinaryMask& a, const imaging::StructuringElement& se) {
    const int w = a.width(), h = a.height(), r = se.radius();
    auto hits = [&](int qx, int qy) {
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const int x = qx + dx, y = qy + dy;
                if (se.contains(dx, dy) && x >= 0 && y >= 0 && x < w && y < h && a.at(x, y)) return true;
            }
        return false;
    };
    BinaryMask out(w, h);
    for (int py = 0; py < h; ++py)
        for (int px = 0; px < w; ++px) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy)
                for (int dx = -r; dx <= r && all; ++dx) {
                    // q = p - d has p = q + d in B_q.
                    const int qx = px - dx, qy = py - dy;
                    if (se.contains(dx, dy) && qx >= 0 && qy >= 0 && qx < w && qy < h && !hits(qx, qy)) all = false;
                }
            out.set(px, py, all);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics computed from label/prediction lists one class at a time.

struct NaiveMetrics {
    double accuracy, precision, recall, f1;
};

inline NaiveMetrics metrics(const metrics::ConfusionMatrix& cm) {
    // Expand back to explicit pairs so nothing depends on the count algebra.
    std::vector<int> y, p;
    auto push = [&](std::uint64_t n, int label, int pred) {
        for (std::uint64_t i = 0; i < n; ++i) {
            y.push_back(label);
            p.push_back(pred);
        }
    };
    push(cm.tn, 0, 0);
    push(cm.fp, 0, 1);
    push(cm.fn, 1, 0);
    push(cm.tp, 1, 1);
    double prec_sum = 0, rec_sum = 0, f1_sum = 0, correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += y[i] == p[i];
    for (int c = 0; c < 2; ++c) {
        double hit = 0, predicted = 0, actual = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            hit += (p[i] == c && y[i] == c);
            predicted += p[i] == c;
            actual += y[i] == c;
        }
        const double prec = predicted > 0 ? hit / predicted : 0.0;
        const double rec = actual > 0 ? hit / actual : 0.0;
        prec_sum += prec;
        rec_sum += rec;
        f1_sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    }
    return {correct / static_cast<double>(y.size()), prec_sum / 2, rec_sum / 2, f1_sum / 2};
}

// ---------------------------------------------------------------------------
// Gradient checking against central differences evaluated in double.

struct GradReport {
    double relative_error = 0;  // |ga - gn| / (|ga| + |gn|)
    double analytic_norm = 0;
    double numeric_norm = 0;
    std::size_t entries = 0;
};

// `build(tape, inputs)` records a graph on a Tape<float> or Tape<double> and
// returns any node; non-scalar outputs are reduced with fixed random weights.
// Analytic gradients come from a tape of type T; the finite differences
// always run in double on the same (T-representable) input values.
template <typename T, typename Build>
GradReport check_gradients(Build build, std::vector<Tensor<double>> inputs, std::uint64_t seed, double h = 1e-6,
                           std::size_t max_entries = 0) {
    Rng rng(seed);
    for (auto& t : inputs)
        for (auto& v : t.values) v = static_cast<double>(static_cast<T>(v));

    std::vector<double> weights;
    auto reduce = [&]<typename U>(ad::Tape<U>& tape, ad::Var out) {
        if (numel(tape.shape(out)) == 1) return out;
        const std::size_t n = numel(tape.shape(out));
        if (weights.empty())
            for (std::size_t i = 0; i < n; ++i) weights.push_back(static_cast<double>(static_cast<T>(rng.uniform(-1, 1))));
        std::vector<U> w(weights.begin(), weights.end());
        const ad::Var wv = tape.constant({1, n}, std::move(w));
        const ad::Var bv = tape.constant({1}, {U(0)});
        return ad::dense(tape, ad::flatten(tape, out), wv, bv);
    };

    // Analytic pass.
    std::vector<Tensor<T>> params;
    for (const auto& t : inputs) params.push_back(t.template cast<T>());
    ad::Tape<T> tape;
    std::vector<ad::Var> vars;
    for (auto& p : params) {
        p.requires_grad = true;
        vars.push_back(tape.parameter(p));
    }
    const ad::Var root = reduce(tape, build(tape, std::span<const ad::Var>(vars)));
    tape.backward(root);

    auto eval = [&](const std::vector<Tensor<double>>& in) {
        ad::Tape<double> t;
        std::vector<ad::Var> v;
        for (const auto& x : in) v.push_back(t.constant(x));
        return t.item(reduce(t, build(t, std::span<const ad::Var>(v))));
    };

    // Which entries to probe: all, or a seeded random subset.
    std::vector<std::pair<std::size_t, std::size_t>> probes;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        for (std::size_t j = 0; j < inputs[i].values.size(); ++j) probes.emplace_back(i, j);
    if (max_entries && probes.size() > max_entries) {
        for (std::size_t k = 0; k < max_entries; ++k)
            std::swap(probes[k], probes[k + rng.index(probes.size() - k)]);
        probes.resize(max_entries);
    }

    GradReport rep;
    double diff2 = 0, a2 = 0, n2 = 0;
    for (auto [i, j] : probes) {
        const double orig = inputs[i].values[j];
        inputs[i].values[j] = orig + h;
        const double fp = eval(inputs);
        inputs[i].values[j] = orig - h;
        const double fm = eval(inputs);
        inputs[i].values[j] = orig;
        const double gn = (fp - fm) / (2 * h);
        const double ga = params[i].grad.empty() ? 0.0 : static_cast<double>(params[i].grad[j]);
        diff2 += (ga - gn) * (ga - gn);
        a2 += ga * ga;
        n2 += gn * gn;
    }
    rep.entries = probes.size();
    rep.analytic_norm = std::sqrt(a2);
    rep.numeric_norm = std::sqrt(n2);
    const double denom = rep.analytic_norm + rep.numeric_norm;
    rep.relative_error = denom == 0 ? 0.0 : std::sqrt(diff2) / denom;
    return rep;
}

inline Tensor<double> random_tensor(Shape shape, Rng& rng, double lo = -1, double hi = 1) {
    std::vector<double> v(numel(shape));
    for (auto& x : v) x = rng.uniform(lo, hi);
    return Tensor<double>(std::move(shape), std::move(v));
}

}  // namespace siamcut::oracle

// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "siamcut/errors.hpp"
#include "siamcut/ops.hpp"

namespace siamcut::training {

namespace {

const char* class_name(int cls) { return cls == 0 ? "halal" : "non-halal"; }

// Picks one image of class `cls`; returns whether it came from the segmented pool.
std::pair<const Image*, bool> draw_image(const DatasetPools& pools, int cls, Rng& rng) {
    const auto& seg = pools.segmented[cls];
    const auto& raw = pools.raw[cls];
    bool use_seg = rng.bernoulli(pools.segmented_probability);
    if (use_seg && seg.empty()) use_seg = false;
    if (!use_seg && raw.empty()) use_seg = true;
    const auto& pool = use_seg ? seg : raw;
    if (pool.empty()) throw SamplingError(std::string("no images for class ") + class_name(cls));
    return {&pool[rng.index(pool.size())], use_seg};
}

}  // namespace

PairSample sample_pair(const DatasetPools& pools, Rng& rng) {
    if (!(pools.segmented_probability >= 0.0 && pools.segmented_probability <= 1.0))
        throw InvalidInput("segmented sampling probability must be in [0, 1]");
    PairSample s;
    s.label = rng.bernoulli(0.5) ? 1 : 0;
    s.class_a = static_cast<int>(rng.index(kClassCount));
    s.class_b = s.label == 1 ? s.class_a : 1 - s.class_a;
    const auto [a, seg_a] = draw_image(pools, s.class_a, rng);
    const auto [b, seg_b] = draw_image(pools, s.class_b, rng);
    s.a = *a;
    s.b = *b;
    s.segmented_a = seg_a;
    s.segmented_b = seg_b;
    return s;
}

Split split_dataset(std::span<const int> classes, const SplitRatios& ratios, std::uint64_t seed) {
    if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw InvalidInput("split ratios must be non-negative and sum to 1");
    int max_class = -1;
    for (int c : classes) {
        if (c < 0) throw InvalidInput("split_dataset: negative class label");
        max_class = std::max(max_class, c);
    }
    Split split;
    for (int cls = 0; cls <= max_class; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i] == cls) idx.push_back(i);
        if (idx.empty()) continue;
        if (idx.size() < 3)
            throw InvalidInput("split_dataset: class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                               " items, stratification needs at least 3");
        Rng rng = substream(seed, "split/" + std::to_string(cls));
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
        const double n = static_cast<double>(idx.size());
        // The small bias keeps products such as 100 * 0.7 from flooring to 69.
        const auto n_train = static_cast<std::size_t>(std::floor(n * ratios.train + 1e-9));
        const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.val + 1e-9));
        split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.val.insert(split.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                         idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        split.test.insert(split.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    }
    return split;
}

double bce_loss(double p, int label) {
    const double pc = std::clamp(p, ad::kBceEpsilon, 1.0 - ad::kBceEpsilon);
    return -(label * std::log(pc) + (1 - label) * std::log(1.0 - pc));
}

// ---------------------------------------------------------------------------
// TrainConfig

const std::vector<std::string>& TrainConfig::keys() {
    static const std::vector<std::string> k = {"lr",          "lr_decay",      "decay_every",
                                               "batch_size",  "epochs",        "steps_per_epoch",
                                               "l2_lambda",   "l2_all_kernels", "seed",
                                               "augment_probability", "segmented_probability", "val_pairs"};
    return k;
}

void TrainConfig::set(std::string_view key, std::string_view value) {
    auto count = [&](std::string_view k) {
        const auto v = parse_int(k, value);
        if (v < 0) throw ConfigError("key '" + std::string(k) + "' must be >= 0");
        return static_cast<std::size_t>(v);
    };
    if (key == "lr")
        lr = parse_double(key, value);
    else if (key == "lr_decay")
        lr_decay = parse_double(key, value);
    else if (key == "decay_every") {
        if (value == "epoch")
            decay_every = DecayEvery::Epoch;
        else if (value == "step")
            decay_every = DecayEvery::Step;
        else
            throw ConfigError("key 'decay_every' must be 'epoch' or 'step'");
    } else if (key == "batch_size")
        batch_size = count(key);
    else if (key == "epochs")
        epochs = count(key);
    else if (key == "steps_per_epoch")
        steps_per_epoch = count(key);
    else if (key == "l2_lambda")
        l2_lambda = parse_double(key, value);
    else if (key == "l2_all_kernels")
        l2_all_kernels = parse_bool(key, value);
    else if (key == "seed")
        seed = parse_u64(key, value);
    else if (key == "augment_probability")
        augment_probability = parse_double(key, value);
    else if (key == "segmented_probability")
        segmented_probability = parse_double(key, value);
    else if (key == "val_pairs")
        val_pairs = count(key);
    else
        throw ConfigError("unknown key '" + std::string(key) + "'");
}

void TrainConfig::validate() const {
    if (!(lr >= 0)) throw ConfigError("'lr' must be >= 0");
    if (!(lr_decay > 0)) throw ConfigError("'lr_decay' must be positive");
    if (batch_size == 0) throw ConfigError("'batch_size' must be positive");
    if (epochs == 0) throw ConfigError("'epochs' must be positive");
    if (steps_per_epoch == 0) throw ConfigError("'steps_per_epoch' must be positive");
    if (!(l2_lambda >= 0)) throw ConfigError("'l2_lambda' must be >= 0");
    if (!(augment_probability >= 0 && augment_probability <= 1))
        throw ConfigError("'augment_probability' must be in [0, 1]");
    if (!(segmented_probability >= 0 && segmented_probability <= 1))
        throw ConfigError("'segmented_probability' must be in [0, 1]");
    if (val_pairs == 0) throw ConfigError("'val_pairs' must be positive");
}

std::string TrainConfig::to_text() const {
    std::ostringstream os;
    os << "lr = " << format_double(lr) << "\nlr_decay = " << format_double(lr_decay)
       << "\ndecay_every = " << (decay_every == DecayEvery::Epoch ? "epoch" : "step")
       << "\nbatch_size = " << batch_size << "\nepochs = " << epochs << "\nsteps_per_epoch = " << steps_per_epoch
       << "\nl2_lambda = " << format_double(l2_lambda) << "\nl2_all_kernels = " << (l2_all_kernels ? "true" : "false")
       << "\nseed = " << seed << "\naugment_probability = " << format_double(augment_probability)
       << "\nsegmented_probability = " << format_double(segmented_probability) << "\nval_pairs = " << val_pairs
       << "\n";
    return os.str();
}

std::string History::to_csv(bool header) const {
    std::string out = header ? "epoch,train_loss,train_acc,val_loss,val_acc\n" : "";
    char buf[160];
    for (const auto& e : epochs) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f\n", e.epoch, e.train_loss, e.train_acc, e.val_loss,
                      e.val_acc);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<PreparedPair> make_pairs(const DatasetPools& pools, std::size_t n, std::uint64_t seed,
                                     const backbone::BackboneConfig& config) {
    Rng rng(seed);
    std::vector<PreparedPair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PairSample s = sample_pair(pools, rng);
        out.push_back({siamese::to_network_input<float>(s.a, config), siamese::to_network_input<float>(s.b, config),
                       s.label});
    }
    return out;
}

Evaluation evaluate(const siamese::Model<float>& model, std::span<const PreparedPair> pairs, double threshold) {
    if (pairs.empty()) throw InvalidInput("evaluate: no pairs");
    Evaluation ev;
    double loss = 0;
    std::size_t correct = 0;
    for (const auto& pr : pairs) {
        const float p = siamese::forward_pair(model, pr.a, pr.b);
        const int pred = p >= threshold ? 1 : 0;
        loss += bce_loss(p, pr.label);
        correct += pred == pr.label;
        ev.probabilities.push_back(p);
        ev.predictions.push_back(pred);
        ev.labels.push_back(pr.label);
    }
    ev.loss = loss / static_cast<double>(pairs.size());
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());
    return ev;
}

// ---------------------------------------------------------------------------
// Optimization

namespace {

std::vector<ad::Var> l2_targets(const siamese::Model<float>& model, std::span<const ad::Var> params, bool all) {
    std::vector<ad::Var> out;
    if (all) {
        for (std::size_t i = 0; i < model.specs().size(); ++i)
            if (model.specs()[i].is_kernel) out.push_back(params[i]);
    } else {
        for (auto i : model.head_kernel_indices()) out.push_back(params[i]);
    }
    return out;
}

std::vector<Tensor<float>*> param_pointers(siamese::Model<float>& model) {
    std::vector<Tensor<float>*> ptrs;
    for (auto& p : model.params()) ptrs.push_back(&p);
    return ptrs;
}

struct StepOutcome {
    double bce = 0;  // mean over the batch
    std::size_t correct = 0;
};

// Forward + backward + Adam on one batch of (a, b, label) tensors.
template <typename Batch>
StepOutcome optimize(siamese::Model<float>& model, ad::AdamState<float>& adam, const Batch& batch, double l2_lambda,
                     bool l2_all) {
    for (auto& p : model.params()) p.zero_grad();
    ad::Tape<float> tape;
    const auto params = siamese::bind_parameters(tape, model);
    std::vector<ad::Var> losses;
    StepOutcome out;
    for (const auto& [a, b, label] : batch) {
        const ad::Var va = tape.constant(*a);
        const ad::Var vb = tape.constant(*b);
        const ad::Var p = siamese::pair_probability(tape, model, std::span<const ad::Var>(params), va, vb);
        out.correct += ((tape.item(p) >= 0.5f ? 1 : 0) == label);
        losses.push_back(ad::bce_loss(tape, p, static_cast<float>(label)));
    }
    const ad::Var bce = ad::mean(tape, std::span<const ad::Var>(losses));
    out.bce = tape.item(bce);
    ad::Var total = bce;
    if (l2_lambda > 0) {
        const auto targets = l2_targets(model, params, l2_all);
        const ad::Var reg = ad::l2_penalty(tape, std::span<const ad::Var>(targets), static_cast<float>(l2_lambda));
        const ad::Var terms[] = {bce, reg};
        total = ad::sum(tape, std::span<const ad::Var>(terms));
    }
    if (!std::isfinite(tape.item(total)))
        throw NumericalError("non-finite training loss (bce " + std::to_string(out.bce) + ", total " +
                             std::to_string(tape.item(total)) + ")");
    tape.backward(total);
    const auto ptrs = param_pointers(model);
    ad::adam_step(adam, std::span<Tensor<float>* const>(ptrs));
    return out;
}

}  // namespace

double train_step(siamese::Model<float>& model, ad::AdamState<float>& adam, std::span<const PreparedPair> batch,
                  double l2_lambda, bool l2_all_kernels) {
    std::vector<std::tuple<const Tensor<float>*, const Tensor<float>*, int>> items;
    for (const auto& pr : batch) items.emplace_back(&pr.a, &pr.b, pr.label);
    return optimize(model, adam, items, l2_lambda, l2_all_kernels).bce;
}

TrainResult train(siamese::Model<float> model, const DatasetPools& train_pools, const DatasetPools& val_pools,
                  const TrainConfig& cfg, const siamese::TrainingState* resume, const EpochCallback& on_epoch) {
    cfg.validate();
    DatasetPools pools = train_pools;
    pools.segmented_probability = cfg.segmented_probability;
    DatasetPools vpools = val_pools;
    vpools.segmented_probability = cfg.segmented_probability;

    const auto& bcfg = model.config();
    const auto val_pairs = make_pairs(vpools, cfg.val_pairs, substream_seed(cfg.seed, "validation"), bcfg);

    siamese::TrainingState state;
    if (resume) {
        state = *resume;
    } else {
        state.adam.lr = cfg.lr;
        state.adam.decay = cfg.lr_decay;
    }

    augment::AugmentConfig aug_cfg = augment::AugmentConfig::uniform(cfg.augment_probability);
    aug_cfg.output_width = static_cast<int>(bcfg.input.width);
    aug_cfg.output_height = static_cast<int>(bcfg.input.height);

    TrainResult result{model, model, {}, {}};
    double best_acc = -1, best_loss = 0;

    for (std::size_t epoch = state.epoch; epoch < cfg.epochs; ++epoch) {
        // Per-epoch substreams make a resumed run identical to an uninterrupted one.
        const std::string tag = "/" + std::to_string(epoch);
        Rng sampler = substream(cfg.seed, "sampler" + tag);
        augment::Pipeline aug(aug_cfg, substream_seed(cfg.seed, "augment" + tag));

        double loss_sum = 0;
        std::size_t correct = 0, seen = 0;
        for (std::size_t step = 0; step < cfg.steps_per_epoch; ++step) {
            std::vector<Tensor<float>> a_t, b_t;
            std::vector<int> labels;
            for (std::size_t i = 0; i < cfg.batch_size; ++i) {
                const PairSample s = sample_pair(pools, sampler);
                auto [a, b] = aug.apply_pair(s.a, s.b);
                a_t.push_back(siamese::to_network_input<float>(a, bcfg));
                b_t.push_back(siamese::to_network_input<float>(b, bcfg));
                labels.push_back(s.label);
            }
            std::vector<std::tuple<const Tensor<float>*, const Tensor<float>*, int>> items;
            for (std::size_t i = 0; i < labels.size(); ++i) items.emplace_back(&a_t[i], &b_t[i], labels[i]);
            StepOutcome o;
            try {
                o = optimize(model, state.adam, items, cfg.l2_lambda, cfg.l2_all_kernels);
            } catch (const NumericalError& e) {
                throw NumericalError("epoch " + std::to_string(epoch) + " step " + std::to_string(step) + ": " +
                                     e.what());
            }
            loss_sum += o.bce * static_cast<double>(labels.size());
            correct += o.correct;
            seen += labels.size();
            if (cfg.decay_every == DecayEvery::Step) ad::decay_lr(state.adam);
        }
        if (cfg.decay_every == DecayEvery::Epoch) ad::decay_lr(state.adam);
        state.epoch = static_cast<std::uint32_t>(epoch + 1);

        const Evaluation val = evaluate(model, val_pairs);
        EpochRecord rec{epoch, loss_sum / static_cast<double>(seen),
                        static_cast<double>(correct) / static_cast<double>(seen), val.loss, val.accuracy};
        result.history.epochs.push_back(rec);
        if (val.accuracy > best_acc || (val.accuracy == best_acc && val.loss < best_loss)) {
            best_acc = val.accuracy;
            best_loss = val.loss;
            result.best = model;
        }
        if (on_epoch) on_epoch(rec);
    }
    result.last = std::move(model);
    result.state = std::move(state);
    return result;
}

}  // namespace siamcut::training

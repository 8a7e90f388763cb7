// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "siamcut/augmentation.hpp"
#include "siamcut/image.hpp"
#include "siamcut/kvconfig.hpp"
#include "siamcut/random.hpp"
#include "siamcut/siamese.hpp"

namespace siamcut::training {

/// Class indices used throughout: 0 = halal, 1 = non-halal.
inline constexpr int kClassCount = 2;

/// Raw and segmented image pools per class.
struct DatasetPools {
    std::array<std::vector<Image>, kClassCount> raw;
    std::array<std::vector<Image>, kClassCount> segmented;
    double segmented_probability = 2.0 / 3.0;

    std::size_t size(int cls) const { return raw[cls].size() + segmented[cls].size(); }
};

struct PairSample {
    Image a;
    Image b;
    int label = 0;  // 1 when both images share a class
    int class_a = 0;
    int class_b = 0;
    bool segmented_a = false;
    bool segmented_b = false;
};

/// Label uniform over {0, 1}; classes drawn consistently with it; each image
/// independently from the segmented pool with the configured probability
/// (falling back to whichever pool of the class is non-empty).
PairSample sample_pair(const DatasetPools& pools, Rng& rng);

struct SplitRatios {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Stratified shuffle split over item indices. Per class: floor(n*train)
/// and floor(n*val) items, the remainder to test. Classes with fewer than
/// three items cannot be stratified and raise an error.
Split split_dataset(std::span<const int> classes, const SplitRatios& ratios, std::uint64_t seed);

/// -(y log p + (1-y) log(1-p)), p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int label);

enum class DecayEvery { Epoch, Step };

struct TrainConfig {
    double lr = 1e-4;
    double lr_decay = 0.99;
    DecayEvery decay_every = DecayEvery::Epoch;
    std::size_t batch_size = 8;
    std::size_t epochs = 3200;
    std::size_t steps_per_epoch = 100;
    double l2_lambda = 1e-4;
    bool l2_all_kernels = false;  // default: dense head kernels only
    std::uint64_t seed = 0;
    double augment_probability = 0.5;
    double segmented_probability = 2.0 / 3.0;
    std::size_t val_pairs = 256;

    /// Sets one key; throws ConfigError naming unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    void validate() const;
    /// Fully resolved `key = value` text.
    std::string to_text() const;
    static const std::vector<std::string>& keys();
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0;  // mean BCE over the epoch's training pairs
    double train_acc = 0;
    double val_loss = 0;
    double val_acc = 0;
};

struct History {
    std::vector<EpochRecord> epochs;

    /// Header `epoch,train_loss,train_acc,val_loss,val_acc`.
    std::string to_csv(bool header = true) const;
};

/// Pair already converted to network tensors.
struct PreparedPair {
    Tensor<float> a;
    Tensor<float> b;
    int label = 0;
};

/// `n` pairs drawn with `seed`, no augmentation.
std::vector<PreparedPair> make_pairs(const DatasetPools& pools, std::size_t n, std::uint64_t seed,
                                     const backbone::BackboneConfig& config);

struct Evaluation {
    double loss = 0;
    double accuracy = 0;
    std::vector<float> probabilities;
    std::vector<int> predictions;  // p >= threshold
    std::vector<int> labels;
};

Evaluation evaluate(const siamese::Model<float>& model, std::span<const PreparedPair> pairs, double threshold = 0.5);

struct TrainResult {
    siamese::Model<float> best;   // highest validation accuracy seen
    siamese::Model<float> last;
    siamese::TrainingState state;  // optimizer state after the last epoch
    History history;               // epochs trained in this call
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Runs epochs [resume ? resume->epoch : 0, cfg.epochs). Each step samples
/// `batch_size` pairs, augments, evaluates the pair probability, and takes
/// one Adam step on mean BCE plus the L2 penalty. Throws NumericalError on a
/// non-finite loss.
TrainResult train(siamese::Model<float> model, const DatasetPools& train_pools, const DatasetPools& val_pools,
                  const TrainConfig& cfg, const siamese::TrainingState* resume = nullptr,
                  const EpochCallback& on_epoch = {});

/// One optimizer step on a fixed batch; returns the loss before the step.
double train_step(siamese::Model<float>& model, ad::AdamState<float>& adam, std::span<const PreparedPair> batch,
                  double l2_lambda, bool l2_all_kernels = false);

}  // namespace siamcut::training

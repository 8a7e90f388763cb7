// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "siamcut/image.hpp"
#include "siamcut/imaging.hpp"
#include "siamcut/siamese.hpp"

namespace siamcut::inference {

/// Reference images per class label, already in network space.
struct ControlSet {
    std::map<std::string, std::vector<Tensor<float>>> classes;

    void add(const std::string& label, Tensor<float> image);
    void validate() const;  // at least one class, none empty
};

enum class Aggregation { Mean, Max };

struct Preprocess {
    bool segment = true;  // segment_cut first, raw image on failure
    imaging::SegmentationParams params;
};

/// Segments (when enabled) and converts to the model input. `segmented`
/// reports whether segmentation was actually used.
Tensor<float> prepare(const Image& rgb, const backbone::BackboneConfig& config, const Preprocess& pre,
                      bool* segmented = nullptr);

struct Classification {
    std::string label;
    std::map<std::string, double> scores;
};

/// Scores each class by aggregating forward_pair(query, control) over its
/// images; highest score wins, ties go to the lexicographically first label.
Classification classify(const siamese::Model<float>& model, const Tensor<float>& query, const ControlSet& control,
                        Aggregation aggregation = Aggregation::Mean);

/// forward_pair(a, b) >= threshold.
bool verify(const siamese::Model<float>& model, const Tensor<float>& a, const Tensor<float>& b,
            double threshold = 0.5);

/// Lines `<label> <image-path>`; relative paths resolve against the file's
/// directory; `#` starts a comment. Throws DataError when no entries remain.
ControlSet load_control_set(const std::filesystem::path& path, const backbone::BackboneConfig& config,
                            const Preprocess& pre);

}  // namespace siamcut::inference

// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/inference.hpp"

#include <algorithm>

#include "siamcut/errors.hpp"
#include "siamcut/kvconfig.hpp"

namespace siamcut::inference {

void ControlSet::add(const std::string& label, Tensor<float> image) {
    if (label.empty()) throw InvalidInput("control set: empty class label");
    classes[label].push_back(std::move(image));
}

void ControlSet::validate() const {
    if (classes.empty()) throw InvalidInput("control set is empty");
    for (const auto& [label, images] : classes)
        if (images.empty()) throw InvalidInput("control set class '" + label + "' has no images");
}

Tensor<float> prepare(const Image& rgb, const backbone::BackboneConfig& config, const Preprocess& pre,
                      bool* segmented) {
    if (segmented) *segmented = false;
    if (pre.segment) {
        try {
            auto seg = imaging::segment_cut(rgb, pre.params);
            if (segmented) *segmented = true;
            return siamese::to_network_input<float>(seg.masked, config);
        } catch (const DegenerateHistogram&) {
        }
    }
    return siamese::to_network_input<float>(rgb, config);
}

Classification classify(const siamese::Model<float>& model, const Tensor<float>& query, const ControlSet& control,
                        Aggregation aggregation) {
    control.validate();
    Classification out;
    double best = -1;
    // std::map iterates labels in lexicographic order, so strict > keeps the first on ties.
    for (const auto& [label, images] : control.classes) {
        double score = aggregation == Aggregation::Mean ? 0.0 : -1.0;
        for (const auto& c : images) {
            const double p = siamese::forward_pair(model, query, c);
            score = aggregation == Aggregation::Mean ? score + p : std::max(score, p);
        }
        if (aggregation == Aggregation::Mean) score /= static_cast<double>(images.size());
        out.scores[label] = score;
        if (score > best) {
            best = score;
            out.label = label;
        }
    }
    return out;
}

bool verify(const siamese::Model<float>& model, const Tensor<float>& a, const Tensor<float>& b, double threshold) {
    return siamese::forward_pair(model, a, b) >= threshold;
}

ControlSet load_control_set(const std::filesystem::path& path, const backbone::BackboneConfig& config,
                            const Preprocess& pre) {
    const std::string text = read_text_file(path);
    ControlSet set;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        const auto space = line.find_first_of(" \t");
        if (space == std::string::npos)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected '<label> <image-path>'");
        const std::string label = line.substr(0, space);
        std::filesystem::path image = trim(line.substr(space + 1));
        if (image.is_relative()) image = path.parent_path() / image;
        set.add(label, prepare(read_image(image), config, pre));
    }
    if (set.classes.empty()) throw DataError("control set '" + path.string() + "' has no entries");
    return set;
}

}  // namespace siamcut::inference

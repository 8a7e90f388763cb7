// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "siamcut/image.hpp"
#include "siamcut/imaging.hpp"
#include "siamcut/training.hpp"

namespace siamcut::data {

enum class Visibility { Clear, Blurred, Bloodied, Dark, Obstructed, Side };
inline constexpr std::size_t kVisibilityCount = 6;

std::string_view visibility_name(Visibility v);
Visibility parse_visibility(std::string_view name);  // ManifestError on unknown tags

/// "halal" = 0, "non-halal" = 1.
std::string_view class_name(int cls);
int parse_class(std::string_view name);

struct Record {
    std::string path;  // as written in the manifest, relative to its directory
    int cls = 0;
    Visibility visibility = Visibility::Clear;
    bool segmented = false;  // the file already is a segmented image

    friend bool operator==(const Record&, const Record&) = default;
};

struct DatasetManifest {
    std::filesystem::path base_dir;  // relative record paths resolve against this
    std::vector<Record> records;      // sorted by path

    std::filesystem::path resolve(const Record& r) const { return base_dir / r.path; }
    std::vector<int> classes() const;
    std::size_t count(int cls) const;
};

// CSV `path,class,visibility,segmented`. A first line starting with `path`
// is a header. Blank lines are skipped.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               bool check_files = true);
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true);
std::string format_manifest(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Stratified split of the records (see training::split_dataset).
std::array<DatasetManifest, 3> split_manifest(const DatasetManifest& manifest, const training::SplitRatios& ratios,
                                              std::uint64_t seed);

// Synthetic stand-in dataset. Both classes show a pale carcass region on a
// class-specific background. Class 0 carries a long dark-red curved band
// (the visible cut); class 1 only a short straight red stub. Visibility tags
// perturb the rendering (extra blur, stray blood, low light, an occluder, a
// thinner side view).
struct SyntheticSpec {
    std::uint64_t seed = 0;
    int size = 64;
    std::array<std::size_t, 2> counts = {200, 200};
    double noise = 6.0;            // per-channel Gaussian sigma
    bool visibility_mix = true;    // tags drawn with the reference dataset proportions; else all clear

    /// `key = value` text: seed, size, halal_count, non_halal_count, noise, visibility_mix.
    static SyntheticSpec parse(std::string_view text);
    static SyntheticSpec load(const std::filesystem::path& path);
    void validate() const;
};

/// Proportions of the visibility tags (clear, blurred, bloodied, dark, obstructed, side).
inline constexpr std::array<std::size_t, kVisibilityCount> kVisibilityWeights = {520, 13, 126, 25, 14, 39};

struct SyntheticImage {
    Image image;
    BinaryMask truth;  // band (class 0) or stub (class 1) pixels that remain visible
    Visibility visibility = Visibility::Clear;
};

/// Renders image `index` of class `cls`; a pure function of its arguments.
SyntheticImage render_synthetic(const SyntheticSpec& spec, int cls, std::size_t index);

/// Writes images/NNNNN.ppm, masks/NNNNN.pgm and manifest.csv under `out_dir`.
DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

struct PreparedPools {
    training::DatasetPools pools;
    std::size_t failures = 0;  // raw images whose segmentation failed
    std::vector<std::string> failed_paths;
};

/// Raw records go to the raw pool and, when segmentation succeeds, their
/// masked image to the segmented pool. Records flagged segmented go to the
/// segmented pool only.
PreparedPools prepare_pools(const DatasetManifest& manifest, const imaging::SegmentationParams& params = {});

inline Image decode_image(const std::filesystem::path& path) { return read_image(path); }
inline void encode_image(const Image& img, const std::filesystem::path& path) { write_image(img, path); }

}  // namespace siamcut::data

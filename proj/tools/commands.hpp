// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand implementations behind the `siamcut` executable. Each returns
// normally on success and throws a siamcut::Error otherwise; main() maps the
// error category onto the process exit code.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siamcut/imaging.hpp"
#include "siamcut/inference.hpp"

namespace siamcut::cli {

namespace fs = std::filesystem;

struct SegmentOptions {
    fs::path input_dir;
    fs::path output_dir;
    imaging::SegmentationParams params;
};

struct SegmentSummary {
    std::size_t processed = 0;
    std::size_t failed = 0;
};

/// Writes masks/<stem>.pgm, segmented/<stem>.ppm, summary.csv and
/// failures.txt. Per-image failures are reported, not fatal.
SegmentSummary cmd_segment(const SegmentOptions& opt, std::ostream& log);

struct TrainOptions {
    fs::path manifest;
    fs::path backbone_config;
    std::optional<fs::path> train_config;
    fs::path output_dir;
    std::optional<fs::path> resume;
    std::map<std::string, std::string> overrides;  // applied after the config file
};

/// Splits the manifest 70/15/15 with the training seed, trains on the train
/// split, validates on the val split. Writes best.ckpt, last.ckpt,
/// history.csv and resolved.cfg.
void cmd_train(const TrainOptions& opt, std::ostream& log);

struct EvalOptions {
    fs::path checkpoint;
    fs::path manifest;
    std::size_t n_pairs = 256;
    std::uint64_t seed = 0;        // pair batch
    std::string split = "test";    // all | train | val | test
    std::uint64_t split_seed = 0;  // must match the training seed
    double threshold = 0.5;
    std::optional<fs::path> csv;
};

void cmd_eval(const EvalOptions& opt, std::ostream& out);

struct InferOptions {
    fs::path checkpoint;
    fs::path control;
    std::vector<fs::path> images;
    bool segment = true;
    inference::Aggregation aggregation = inference::Aggregation::Mean;
};

void cmd_infer(const InferOptions& opt, std::ostream& out);

struct SynthOptions {
    fs::path spec;
    fs::path output_dir;
    std::optional<std::uint64_t> seed;
};

void cmd_synth(const SynthOptions& opt, std::ostream& log);

struct AugmentPreviewOptions {
    fs::path input;
    fs::path output_dir;
    int count = 8;
    std::uint64_t seed = 0;
    double probability = 0.5;
};

void cmd_augment_preview(const AugmentPreviewOptions& opt, std::ostream& log);

}  // namespace siamcut::cli

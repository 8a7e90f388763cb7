// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "siamcut/errors.hpp"
#include "siamcut/training.hpp"

namespace {

using namespace siamcut;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;

void add_segmentation_options(CLI::App& app, imaging::SegmentationParams& params, std::string& channel,
                              std::string& element, int& close_size, int& open_size) {
    app.add_option("--blur-kernel", params.blur_kernel, "Gaussian kernel size (odd)")->capture_default_str();
    app.add_option("--blur-sigma", params.blur_sigma, "Gaussian sigma, 0 derives it from the kernel size");
    app.add_option("--channel", channel, "Thresholded channel")
        ->check(CLI::IsMember({"Y", "Cb", "Cr"}))
        ->capture_default_str();
    app.add_flag("--invert", params.invert, "Treat values at or below the threshold as foreground");
    app.add_option("--element", element, "Structuring element shape")
        ->check(CLI::IsMember({"square", "ellipse"}))
        ->capture_default_str();
    app.add_option("--close-size", close_size, "Closing element size (odd)")->capture_default_str();
    app.add_option("--open-size", open_size, "Opening element size (odd)")->capture_default_str();
}

void finish_segmentation_options(imaging::SegmentationParams& params, const std::string& channel,
                                 const std::string& element, int close_size, int open_size) {
    params.channel = channel == "Y" ? imaging::YccChannel::Y
                     : channel == "Cb" ? imaging::YccChannel::Cb
                                       : imaging::YccChannel::Cr;
    const auto shape = element == "ellipse" ? imaging::ElementShape::Ellipse : imaging::ElementShape::Square;
    params.close_element = imaging::StructuringElement(shape, close_size);
    params.open_element = imaging::StructuringElement(shape, open_size);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"siamcut: cut segmentation and Siamese pair verification"};
    app.require_subcommand(1);

    // segment
    cli::SegmentOptions seg;
    std::string channel = "Cr", element = "square";
    int close_size = 5, open_size = 5;
    auto* segment = app.add_subcommand("segment", "Segment every PPM in a directory");
    segment->add_option("--input", seg.input_dir, "Input directory")->required();
    segment->add_option("--output", seg.output_dir, "Output directory")->required();
    add_segmentation_options(*segment, seg.params, channel, element, close_size, open_size);

    // train
    cli::TrainOptions tr;
    std::optional<std::uint64_t> train_seed;
    std::map<std::string, std::string> override_values;
    auto* train = app.add_subcommand("train", "Train the pair-verification network");
    train->add_option("--manifest", tr.manifest, "Dataset manifest CSV")->required();
    train->add_option("--backbone", tr.backbone_config, "Backbone config file");
    train->add_option("--config", tr.train_config, "Training config file");
    train->add_option("--output", tr.output_dir, "Output directory")->required();
    train->add_option("--resume", tr.resume, "Checkpoint with training state to continue from");
    for (const auto& key : training::TrainConfig::keys())
        train->add_option("--" + key, override_values[key], "Override '" + key + "'");

    // eval
    cli::EvalOptions ev;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a seeded pair batch");
    eval->add_option("--checkpoint", ev.checkpoint)->required();
    eval->add_option("--manifest", ev.manifest)->required();
    eval->add_option("--n-pairs,--n_pairs", ev.n_pairs, "Number of pairs")->capture_default_str();
    eval->add_option("--seed", ev.seed, "Pair sampling seed")->capture_default_str();
    eval->add_option("--split", ev.split, "Manifest split")
        ->check(CLI::IsMember({"all", "train", "val", "test"}))
        ->capture_default_str();
    eval->add_option("--split-seed", ev.split_seed, "Seed the split was made with (the training seed)")
        ->capture_default_str();
    eval->add_option("--threshold", ev.threshold)->capture_default_str();
    eval->add_option("--csv", ev.csv, "Also write the report as CSV");

    // infer
    cli::InferOptions inf;
    bool no_segment = false;
    std::string aggregation = "mean";
    auto* infer = app.add_subcommand("infer", "Classify images against a control set");
    infer->add_option("--checkpoint", inf.checkpoint)->required();
    infer->add_option("--control", inf.control, "Control set file: '<label> <image-path>' lines")->required();
    infer->add_flag("--no-segment", no_segment, "Skip segmentation preprocessing");
    infer->add_option("--aggregation", aggregation)->check(CLI::IsMember({"mean", "max"}))->capture_default_str();
    infer->add_option("images", inf.images, "Query images")->required();

    // synth
    cli::SynthOptions sy;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic dataset");
    synth->add_option("--spec", sy.spec, "Synthetic spec file")->required();
    synth->add_option("--output", sy.output_dir)->required();
    synth->add_option("--seed", sy.seed, "Override the spec seed");

    // augment-preview
    cli::AugmentPreviewOptions ap;
    auto* preview = app.add_subcommand("augment-preview", "Write augmented variants of one image");
    preview->add_option("--input", ap.input)->required();
    preview->add_option("--output", ap.output_dir)->required();
    preview->add_option("--count", ap.count)->capture_default_str();
    preview->add_option("--seed", ap.seed)->capture_default_str();
    preview->add_option("--probability", ap.probability, "Per-technique probability")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*segment) {
            finish_segmentation_options(seg.params, channel, element, close_size, open_size);
            cli::cmd_segment(seg, std::cout);
        } else if (*train) {
            for (const auto& key : training::TrainConfig::keys())
                if (train->count("--" + key)) tr.overrides[key] = override_values[key];
            cli::cmd_train(tr, std::cout);
        } else if (*eval) {
            cli::cmd_eval(ev, std::cout);
        } else if (*infer) {
            inf.segment = !no_segment;
            inf.aggregation = aggregation == "max" ? inference::Aggregation::Max : inference::Aggregation::Mean;
            cli::cmd_infer(inf, std::cout);
        } else if (*synth) {
            cli::cmd_synth(sy, std::cout);
        } else if (*preview) {
            cli::cmd_augment_preview(ap, std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(categorize(e));
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorCategory::Data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}

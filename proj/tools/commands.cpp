// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "siamcut/augmentation.hpp"
#include "siamcut/datakit.hpp"
#include "siamcut/errors.hpp"
#include "siamcut/kvconfig.hpp"
#include "siamcut/metrics.hpp"
#include "siamcut/siamese.hpp"
#include "siamcut/training.hpp"

namespace siamcut::cli {

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text, bool append = false) {
    std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

bool is_image_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

training::TrainConfig load_train_config(const fs::path& path) {
    const auto doc = KvDocument::load(path);
    if (!doc.sections.empty()) throw ConfigError(path.string() + ": sections are not allowed in a training config");
    training::TrainConfig cfg;
    for (const auto& e : doc.root.entries) {
        try {
            cfg.set(e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(path.string() + ":" + std::to_string(e.line) + ": " + err.what());
        }
    }
    return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------

SegmentSummary cmd_segment(const SegmentOptions& opt, std::ostream& log) {
    if (!fs::is_directory(opt.input_dir))
        throw DataError("input directory '" + opt.input_dir.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opt.input_dir))
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    ensure_dir(opt.output_dir / "masks");
    ensure_dir(opt.output_dir / "segmented");

    SegmentSummary summary;
    std::string csv = "file,status,threshold,foreground_pixels\n";
    std::string failures;
    for (const auto& file : files) {
        const std::string name = file.filename().string();
        try {
            const Image img = read_image(file);
            if (img.channels() != 3) throw UnsupportedFormat("expected an RGB image");
            const auto trace = imaging::segment_cut_traced(img, opt.params);
            const std::string stem = file.stem().string();
            write_image(trace.opened.to_image(), opt.output_dir / "masks" / (stem + ".pgm"));
            write_image(trace.masked, opt.output_dir / "segmented" / (stem + ".ppm"));
            csv += name + ",ok," + std::to_string(trace.threshold) + "," + std::to_string(trace.opened.count()) + "\n";
            ++summary.processed;
        } catch (const Error& e) {
            csv += name + ",failed,,\n";
            failures += name + ": " + e.what() + "\n";
            ++summary.failed;
        }
    }
    write_text(opt.output_dir / "summary.csv", csv);
    write_text(opt.output_dir / "failures.txt", failures);
    log << "segmented " << summary.processed << " of " << files.size() << " images";
    if (summary.failed) log << ", " << summary.failed << " failed (see failures.txt)";
    log << "\n";
    return summary;
}

// ---------------------------------------------------------------------------

void cmd_train(const TrainOptions& opt, std::ostream& log) {
    training::TrainConfig cfg = opt.train_config ? load_train_config(*opt.train_config) : training::TrainConfig{};
    for (const auto& [key, value] : opt.overrides) cfg.set(key, value);
    cfg.validate();

    std::optional<siamese::Checkpoint> resumed;
    backbone::BackboneConfig bcfg;
    if (opt.resume) {
        resumed = siamese::load(*opt.resume);
        if (!resumed->state) throw DataError("checkpoint '" + opt.resume->string() + "' has no training state");
        bcfg = resumed->model.config();
        if (!opt.backbone_config.empty() &&
            backbone::BackboneConfig::load(opt.backbone_config).to_text() != bcfg.to_text())
            throw ConfigError("backbone config differs from the resumed checkpoint");
    } else {
        if (opt.backbone_config.empty()) throw ConfigError("a backbone config is required");
        bcfg = backbone::BackboneConfig::load(opt.backbone_config);
    }

    const auto manifest = data::load_manifest(opt.manifest);
    const auto parts = data::split_manifest(manifest, {}, cfg.seed);
    const auto train_pools = data::prepare_pools(parts[0]);
    const auto val_pools = data::prepare_pools(parts[1]);

    ensure_dir(opt.output_dir);
    std::ostringstream resolved;
    resolved << "# training\n"
             << cfg.to_text() << "\n# data\nmanifest = " << fs::absolute(opt.manifest).string()
             << "\ntrain_images = " << parts[0].records.size() << "\nval_images = " << parts[1].records.size()
             << "\ntest_images = " << parts[2].records.size()
             << "\nsegmentation_failures = " << train_pools.failures + val_pools.failures << "\n";
    if (opt.resume) resolved << "resume = " << fs::absolute(*opt.resume).string() << "\n";
    resolved << "\n# backbone\n" << bcfg.to_text();
    write_text(opt.output_dir / "resolved.cfg", resolved.str());
    log << resolved.str() << "\n";

    siamese::Model<float> model = resumed ? resumed->model : [&] {
        Rng init = substream(cfg.seed, "init");
        return siamese::Model<float>::build(bcfg, init);
    }();
    log << "parameters: " << model.param_count() << "\n";

    const fs::path history_path = opt.output_dir / "history.csv";
    const bool append = opt.resume && fs::exists(history_path);
    if (!append) write_text(history_path, training::History{}.to_csv(true));

    auto on_epoch = [&](const training::EpochRecord& r) {
        training::History one;
        one.epochs.push_back(r);
        write_text(history_path, one.to_csv(false), true);
        char line[160];
        std::snprintf(line, sizeof(line), "epoch %zu  train_loss %.4f  train_acc %.4f  val_loss %.4f  val_acc %.4f\n",
                      r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc);
        log << line << std::flush;
    };
    const siamese::TrainingState* resume_state = resumed ? &*resumed->state : nullptr;
    const auto result = training::train(std::move(model), train_pools.pools, val_pools.pools, cfg, resume_state,
                                        on_epoch);
    siamese::save(opt.output_dir / "best.ckpt", result.best);
    siamese::save(opt.output_dir / "last.ckpt", result.last, &result.state);
    log << "wrote " << (opt.output_dir / "best.ckpt").string() << " and " << (opt.output_dir / "last.ckpt").string()
        << "\n";
}

// ---------------------------------------------------------------------------

void cmd_eval(const EvalOptions& opt, std::ostream& out) {
    if (opt.n_pairs == 0) throw ConfigError("n_pairs must be positive");
    const auto ckpt = siamese::load(opt.checkpoint);
    auto manifest = data::load_manifest(opt.manifest);
    if (opt.split != "all") {
        const auto parts = data::split_manifest(manifest, {}, opt.split_seed);
        if (opt.split == "train")
            manifest = parts[0];
        else if (opt.split == "val")
            manifest = parts[1];
        else if (opt.split == "test")
            manifest = parts[2];
        else
            throw ConfigError("split must be one of all, train, val, test");
    }
    const auto pools = data::prepare_pools(manifest);
    const auto pairs =
        training::make_pairs(pools.pools, opt.n_pairs, substream_seed(opt.seed, "eval"), ckpt.model.config());
    const auto ev = training::evaluate(ckpt.model, pairs, opt.threshold);
    const auto cm = metrics::confusion(ev.predictions, ev.labels);
    auto report = metrics::macro_metrics(cm);
    report.loss = ev.loss;
    out << metrics::to_table(cm, report);
    if (opt.csv) write_text(*opt.csv, metrics::to_csv(cm, report));
}

// ---------------------------------------------------------------------------

void cmd_infer(const InferOptions& opt, std::ostream& out) {
    if (opt.images.empty()) throw ConfigError("no query images given");
    const auto ckpt = siamese::load(opt.checkpoint);
    inference::Preprocess pre;
    pre.segment = opt.segment;
    const auto control = inference::load_control_set(opt.control, ckpt.model.config(), pre);
    char buf[64];
    for (const auto& path : opt.images) {
        const auto query = inference::prepare(read_image(path), ckpt.model.config(), pre);
        const auto result = inference::classify(ckpt.model, query, control, opt.aggregation);
        out << path.string() << "\t" << result.label;
        for (const auto& [label, score] : result.scores) {
            std::snprintf(buf, sizeof(buf), "%.6f", score);
            out << "\t" << label << "=" << buf;
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------

void cmd_synth(const SynthOptions& opt, std::ostream& log) {
    auto spec = data::SyntheticSpec::load(opt.spec);
    if (opt.seed) spec.seed = *opt.seed;
    const auto m = data::generate_synthetic(spec, opt.output_dir);
    log << "wrote " << m.records.size() << " images (" << m.count(0) << " halal, " << m.count(1)
        << " non-halal) to " << opt.output_dir.string() << "\n";
}

void cmd_augment_preview(const AugmentPreviewOptions& opt, std::ostream& log) {
    if (opt.count < 1) throw ConfigError("count must be >= 1");
    if (!(opt.probability >= 0 && opt.probability <= 1)) throw ConfigError("probability must be in [0, 1]");
    const Image img = read_image(opt.input);
    augment::Pipeline pipeline(augment::AugmentConfig::uniform(opt.probability), substream_seed(opt.seed, "augment"));
    ensure_dir(opt.output_dir);
    const auto variants = pipeline.preview(img, opt.count);
    const std::string ext = img.channels() == 3 ? ".ppm" : ".pgm";
    char name[32];
    for (std::size_t i = 0; i < variants.size(); ++i) {
        std::snprintf(name, sizeof(name), "preview_%03zu", i);
        write_image(variants[i], opt.output_dir / (name + ext));
    }
    log << "wrote " << variants.size() << " variants to " << opt.output_dir.string() << "\n";
}

}  // namespace siamcut::cli

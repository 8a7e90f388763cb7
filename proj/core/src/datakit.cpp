// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/datakit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "siamcut/errors.hpp"
#include "siamcut/kvconfig.hpp"
#include "siamcut/random.hpp"

namespace siamcut::data {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, kVisibilityCount> kVisibilityNames = {"clear", "blurred",    "bloodied",
                                                                             "dark",  "obstructed", "side"};

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string_view visibility_name(Visibility v) { return kVisibilityNames[static_cast<std::size_t>(v)]; }

Visibility parse_visibility(std::string_view name) {
    for (std::size_t i = 0; i < kVisibilityNames.size(); ++i)
        if (kVisibilityNames[i] == name) return static_cast<Visibility>(i);
    throw ManifestError("unknown visibility tag '" + std::string(name) + "'");
}

std::string_view class_name(int cls) { return cls == 0 ? "halal" : "non-halal"; }

int parse_class(std::string_view name) {
    if (name == "halal") return 0;
    if (name == "non-halal") return 1;
    throw ManifestError("unknown class '" + std::string(name) + "'");
}

std::vector<int> DatasetManifest::classes() const {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.cls);
    return out;
}

std::size_t DatasetManifest::count(int cls) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [cls](const Record& r) { return r.cls == cls; }));
}

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir, bool check_files) {
    DatasetManifest m;
    m.base_dir = base_dir;
    std::set<std::string> seen;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (line_no == 1 && fields[0] == "path") continue;
        const std::string where = "manifest line " + std::to_string(line_no) + ": ";
        if (fields.size() != 4) throw ManifestError(where + "expected 4 fields, got " + std::to_string(fields.size()));
        Record r;
        r.path = fields[0];
        if (r.path.empty()) throw ManifestError(where + "empty path");
        try {
            r.cls = parse_class(fields[1]);
            r.visibility = parse_visibility(fields[2]);
        } catch (const ManifestError& e) {
            throw ManifestError(where + e.what());
        }
        if (fields[3] == "0" || fields[3] == "false")
            r.segmented = false;
        else if (fields[3] == "1" || fields[3] == "true")
            r.segmented = true;
        else
            throw ManifestError(where + "segmented flag must be 0 or 1");
        if (!seen.insert(r.path).second) throw ManifestError(where + "duplicate path '" + r.path + "'");
        if (check_files && !fs::is_regular_file(base_dir / r.path))
            throw ManifestError(where + "missing file '" + (base_dir / r.path).string() + "'");
        m.records.push_back(std::move(r));
    }
    std::sort(m.records.begin(), m.records.end(), [](const Record& a, const Record& b) { return a.path < b.path; });
    return m;
}

DatasetManifest load_manifest(const fs::path& path, bool check_files) {
    const std::string text = read_text_file(path);
    return parse_manifest(text, path.parent_path(), check_files);
}

std::string format_manifest(const DatasetManifest& manifest) {
    std::vector<const Record*> sorted;
    for (const auto& r : manifest.records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const Record* a, const Record* b) { return a->path < b->path; });
    std::string out = "path,class,visibility,segmented\n";
    for (const Record* r : sorted) {
        out += r->path;
        out += ',';
        out += class_name(r->cls);
        out += ',';
        out += visibility_name(r->visibility);
        out += r->segmented ? ",1\n" : ",0\n";
    }
    return out;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
    out << format_manifest(manifest);
    if (!out) throw DataError("failed writing manifest '" + path.string() + "'");
}

std::array<DatasetManifest, 3> split_manifest(const DatasetManifest& manifest, const training::SplitRatios& ratios,
                                              std::uint64_t seed) {
    const auto classes = manifest.classes();
    const auto split = training::split_dataset(classes, ratios, seed);
    std::array<DatasetManifest, 3> out;
    const std::array<const std::vector<std::size_t>*, 3> parts = {&split.train, &split.val, &split.test};
    for (std::size_t k = 0; k < 3; ++k) {
        out[k].base_dir = manifest.base_dir;
        for (auto i : *parts[k]) out[k].records.push_back(manifest.records[i]);
        std::sort(out[k].records.begin(), out[k].records.end(),
                  [](const Record& a, const Record& b) { return a.path < b.path; });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

SyntheticSpec SyntheticSpec::parse(std::string_view text) {
    const auto doc = KvDocument::parse(text);
    if (!doc.sections.empty()) throw ConfigError("synthetic spec: sections are not allowed");
    SyntheticSpec s;
    for (const auto& e : doc.root.entries) {
        if (e.key == "seed")
            s.seed = parse_u64(e.key, e.value);
        else if (e.key == "size")
            s.size = static_cast<int>(parse_int(e.key, e.value));
        else if (e.key == "halal_count" || e.key == "non_halal_count") {
            const auto v = parse_int(e.key, e.value);
            if (v < 0) throw ConfigError("key '" + e.key + "' must be >= 1");
            s.counts[e.key == "halal_count" ? 0 : 1] = static_cast<std::size_t>(v);
        } else if (e.key == "noise")
            s.noise = parse_double(e.key, e.value);
        else if (e.key == "visibility_mix")
            s.visibility_mix = parse_bool(e.key, e.value);
        else
            throw ConfigError("synthetic spec: unknown key '" + e.key + "' (line " + std::to_string(e.line) + ")");
    }
    s.validate();
    return s;
}

SyntheticSpec SyntheticSpec::load(const fs::path& path) { return parse(read_text_file(path)); }

void SyntheticSpec::validate() const {
    if (size < 32 || size > 4096) throw ConfigError("synthetic spec: size must be in [32, 4096]");
    if (counts[0] < 1 || counts[1] < 1) throw ConfigError("synthetic spec: per-class counts must be >= 1");
    if (!(noise >= 0 && noise <= 64)) throw ConfigError("synthetic spec: noise must be in [0, 64]");
}

namespace {

struct Canvas {
    int size;
    std::vector<double> rgb;  // interleaved, floating point until the end

    explicit Canvas(int s) : size(s), rgb(static_cast<std::size_t>(s) * s * 3, 0.0) {}
    double* px(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * size + x) * 3]; }
    void put(int x, int y, const std::array<double, 3>& c) {
        double* p = px(x, y);
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }
};

std::array<double, 3> jitter(const std::array<double, 3>& c, double amount, Rng& rng) {
    return {c[0] + rng.uniform(-amount, amount), c[1] + rng.uniform(-amount, amount),
            c[2] + rng.uniform(-amount, amount)};
}

Visibility draw_visibility(Rng& rng) {
    std::size_t total = 0;
    for (auto w : kVisibilityWeights) total += w;
    auto r = rng.index(total);
    for (std::size_t i = 0; i < kVisibilityCount; ++i) {
        if (r < kVisibilityWeights[i]) return static_cast<Visibility>(i);
        r -= kVisibilityWeights[i];
    }
    return Visibility::Clear;
}

}  // namespace

SyntheticImage render_synthetic(const SyntheticSpec& spec, int cls, std::size_t index) {
    spec.validate();
    if (cls != 0 && cls != 1) throw InvalidInput("render_synthetic: class must be 0 or 1");
    Rng rng = substream(spec.seed, "img/" + std::to_string(cls) + "/" + std::to_string(index));
    const int S = spec.size;
    const double s = S;

    SyntheticImage out;
    out.visibility = spec.visibility_mix ? draw_visibility(rng) : Visibility::Clear;
    const Visibility vis = out.visibility;

    // Background differs per class, a confound that segmentation removes.
    const std::array<double, 3> bg = jitter(cls == 0 ? std::array<double, 3>{110, 112, 118}
                                                     : std::array<double, 3>{95, 115, 80},
                                            8, rng);
    const double gx = rng.uniform(-0.25, 0.25), gy = rng.uniform(-0.25, 0.25);  // gradient, levels per pixel
    const std::array<double, 3> skin = jitter({200, 195, 190}, 8, rng);
    const std::array<double, 3> cut = jitter({175, 25, 35}, 10, rng);

    const double cx = s * (0.5 + rng.uniform(-0.05, 0.05));
    const double cy = s * (0.5 + rng.uniform(-0.05, 0.05));
    const double ea = s * rng.uniform(0.36, 0.42);
    const double eb = s * rng.uniform(0.28, 0.34);

    Canvas cv(S);
    std::vector<std::uint8_t> carcass(static_cast<std::size_t>(S) * S, 0);
    for (int y = 0; y < S; ++y)
        for (int x = 0; x < S; ++x) {
            const double dx = (x + 0.5 - cx) / ea, dy = (y + 0.5 - cy) / eb;
            const double shade = gx * (x - s / 2) + gy * (y - s / 2);
            if (dx * dx + dy * dy <= 1.0) {
                carcass[static_cast<std::size_t>(y) * S + x] = 1;
                cv.put(x, y, {skin[0] + shade * 0.3, skin[1] + shade * 0.3, skin[2] + shade * 0.3});
            } else {
                cv.put(x, y, {bg[0] + shade, bg[1] + shade, bg[2] + shade});
            }
        }

    BinaryMask truth(S, S);
    if (cls == 0) {
        // Arc of a circle whose lowest point sits near the carcass centre.
        double thickness = s * rng.uniform(0.09, 0.12);
        double half_span = rng.uniform(40.0, 55.0) * std::numbers::pi / 180.0;
        if (vis == Visibility::Side) {
            thickness *= 0.8;
            half_span *= 0.7;
        }
        const double radius = s * rng.uniform(0.30, 0.40);
        const double ox = cx + s * rng.uniform(-0.04, 0.04);
        const double oy = cy - radius + s * rng.uniform(0.0, 0.08);
        const double tilt = rng.uniform(-0.2, 0.2);
        for (int y = 0; y < S; ++y)
            for (int x = 0; x < S; ++x) {
                if (!carcass[static_cast<std::size_t>(y) * S + x]) continue;
                const double dx = x + 0.5 - ox, dy = y + 0.5 - oy;
                const double angle = std::atan2(dx, dy) - tilt;  // 0 points straight down
                if (std::abs(std::hypot(dx, dy) - radius) <= thickness / 2 && std::abs(angle) <= half_span) {
                    cv.put(x, y, cut);
                    truth.set(x, y, true);
                }
            }
    } else {
        // Short straight stub: a nick that never opens into a full cut.
        const double len = s * rng.uniform(0.10, 0.14);
        const double thick = s * rng.uniform(0.05, 0.07);
        const double theta = rng.uniform(0.0, std::numbers::pi);
        const double sx = cx + s * rng.uniform(-0.1, 0.1), sy = cy + s * rng.uniform(-0.05, 0.1);
        const double ux = std::cos(theta), uy = std::sin(theta);
        for (int y = 0; y < S; ++y)
            for (int x = 0; x < S; ++x) {
                const double dx = x + 0.5 - sx, dy = y + 0.5 - sy;
                const double along = dx * ux + dy * uy, across = -dx * uy + dy * ux;
                if (std::abs(along) <= len / 2 && std::abs(across) <= thick / 2) {
                    cv.put(x, y, cut);
                    truth.set(x, y, true);
                }
            }
    }

    if (vis == Visibility::Bloodied) {
        const auto n = 3 + rng.index(4);
        for (std::size_t k = 0; k < n; ++k) {
            const double bx = cx + rng.uniform(-ea, ea), by = cy + rng.uniform(-eb, eb);
            const double r = s * rng.uniform(0.02, 0.035);
            const auto blood = jitter({150, 55, 55}, 10, rng);
            for (int y = 0; y < S; ++y)
                for (int x = 0; x < S; ++x)
                    if (std::hypot(x + 0.5 - bx, y + 0.5 - by) <= r && !truth.at(x, y)) cv.put(x, y, blood);
        }
    }
    if (vis == Visibility::Obstructed) {
        // Gray occluder over one side of the cut; ground truth keeps only the visible part.
        const double w = s * rng.uniform(0.15, 0.22);
        const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double x0 = cx + side * s * rng.uniform(0.10, 0.18) - w / 2;
        const auto grey = jitter({128, 128, 128}, 6, rng);
        for (int y = 0; y < S; ++y)
            for (int x = 0; x < S; ++x)
                if (x + 0.5 >= x0 && x + 0.5 <= x0 + w) {
                    cv.put(x, y, grey);
                    truth.set(x, y, false);
                }
    }

    Image img(S, S, 3);
    for (std::size_t i = 0; i < cv.rgb.size(); ++i) img.data()[i] = to_u8(cv.rgb[i]);
    if (vis == Visibility::Blurred) img = imaging::gaussian_blur(img, 5, 1.2);
    const double gain = vis == Visibility::Dark ? 0.55 : 1.0;
    for (auto& v : img.data()) v = to_u8(v * gain + spec.noise * rng.normal());

    out.image = std::move(img);
    out.truth = std::move(truth);
    return out;
}

DatasetManifest generate_synthetic(const SyntheticSpec& spec, const fs::path& out_dir) {
    spec.validate();
    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    if (!ec) fs::create_directories(out_dir / "masks", ec);
    if (ec) throw DataError("cannot create '" + out_dir.string() + "': " + ec.message());

    DatasetManifest m;
    m.base_dir = out_dir;
    char name[32];
    std::size_t serial = 0;
    for (int cls = 0; cls < 2; ++cls)
        for (std::size_t i = 0; i < spec.counts[cls]; ++i, ++serial) {
            const SyntheticImage si = render_synthetic(spec, cls, i);
            std::snprintf(name, sizeof(name), "%05zu", serial);
            write_image(si.image, out_dir / "images" / (std::string(name) + ".ppm"));
            write_image(si.truth.to_image(), out_dir / "masks" / (std::string(name) + ".pgm"));
            m.records.push_back({"images/" + std::string(name) + ".ppm", cls, si.visibility, false});
        }
    save_manifest(m, out_dir / "manifest.csv");
    return m;
}

// ---------------------------------------------------------------------------

PreparedPools prepare_pools(const DatasetManifest& manifest, const imaging::SegmentationParams& params) {
    PreparedPools out;
    for (const auto& r : manifest.records) {
        Image img = read_image(manifest.resolve(r));
        if (img.channels() != 3) throw UnsupportedFormat("'" + r.path + "': expected an RGB image");
        if (r.segmented) {
            out.pools.segmented[r.cls].push_back(std::move(img));
            continue;
        }
        try {
            out.pools.segmented[r.cls].push_back(imaging::segment_cut(img, params).masked);
        } catch (const DegenerateHistogram&) {
            ++out.failures;
            out.failed_paths.push_back(r.path);
        }
        out.pools.raw[r.cls].push_back(std::move(img));
    }
    return out;
}

}  // namespace siamcut::data

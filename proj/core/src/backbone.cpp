// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/backbone.hpp"

#include <sstream>

#include "siamcut/errors.hpp"
#include "siamcut/kvconfig.hpp"

namespace siamcut::backbone {

std::string to_string(const FeatureShape& s) {
    return "(" + std::to_string(s.height) + ", " + std::to_string(s.width) + ", " + std::to_string(s.channels) + ")";
}

namespace {

const char* kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::Conv:
            return "conv";
        case BlockKind::SepConv:
            return "sepconv";
        case BlockKind::MaxPool:
            return "maxpool";
    }
    return "?";
}

std::size_t positive(const KvEntry& e, int block) {
    const auto v = parse_int(e.key, e.value);
    if (v < 1) throw ConfigError("key '" + e.key + "' must be >= 1", block);
    return static_cast<std::size_t>(v);
}

void validate_block(const Block& b, int index) {
    if (b.kernel < 1 || b.stride < 1 || b.repeat < 1 || b.pool_kernel < 1)
        throw ConfigError("kernel, stride, repeat and pool_kernel must be >= 1", index);
    if (b.kind == BlockKind::MaxPool) {
        if (b.residual) throw ConfigError("maxpool blocks cannot be residual", index);
        return;
    }
    if (b.channels.empty()) throw ConfigError("missing 'channels'", index);
    if (b.channels.size() != 1 && b.channels.size() != b.repeat)
        throw ConfigError("'channels' must list one value or one per layer (repeat)", index);
    for (auto c : b.channels)
        if (c == 0) throw ConfigError("channel counts must be >= 1", index);
}

std::size_t out_extent(std::size_t n, std::size_t k, std::size_t s, ad::Padding p, int block) {
    try {
        return ad::conv_output_size(n, k, s, p);
    } catch (const ShapeError& e) {
        throw ConfigError(e.what(), block);
    }
}

// Shape after the main path of block `b` applied to `in`.
FeatureShape main_path_shape(const Block& b, FeatureShape s, int index) {
    switch (b.kind) {
        case BlockKind::MaxPool:
            s.height = out_extent(s.height, b.kernel, b.stride, b.padding, index);
            s.width = out_extent(s.width, b.kernel, b.stride, b.padding, index);
            return s;
        case BlockKind::Conv:
            for (std::size_t j = 0; j < b.repeat; ++j) {
                const std::size_t stride = j == 0 ? b.stride : 1;
                s.height = out_extent(s.height, b.kernel, stride, b.padding, index);
                s.width = out_extent(s.width, b.kernel, stride, b.padding, index);
                s.channels = b.layer_channels(j);
            }
            return s;
        case BlockKind::SepConv:
            for (std::size_t j = 0; j < b.repeat; ++j) {
                s.height = out_extent(s.height, b.kernel, 1, b.padding, index);
                s.width = out_extent(s.width, b.kernel, 1, b.padding, index);
                s.channels = b.layer_channels(j);
            }
            if (b.stride > 1) {
                s.height = out_extent(s.height, b.pool_kernel, b.stride, ad::Padding::Same, index);
                s.width = out_extent(s.width, b.pool_kernel, b.stride, ad::Padding::Same, index);
            }
            return s;
    }
    return s;
}

bool needs_projection(const FeatureShape& in, const FeatureShape& out) { return !(in == out); }

}  // namespace

BackboneConfig BackboneConfig::parse(std::string_view text) {
    const KvDocument doc = KvDocument::parse(text);
    BackboneConfig cfg;
    for (const auto& e : doc.root.entries) {
        if (e.key == "input") {
            const auto dims = parse_int_list(e.key, e.value);
            if (dims.size() != 3 || dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
                throw ConfigError("'input' must be three positive integers: height, width, channels");
            cfg.input = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                         static_cast<std::size_t>(dims[2])};
        } else {
            throw ConfigError("unknown key '" + e.key + "'");
        }
    }
    int index = 0;
    for (const auto& sec : doc.sections) {
        if (sec.name != "block") throw ConfigError("unknown section [" + sec.name + "]");
        Block b;
        b.channels.clear();
        for (const auto& e : sec.entries) {
            if (e.key == "kind") {
                if (e.value == "conv")
                    b.kind = BlockKind::Conv;
                else if (e.value == "sepconv")
                    b.kind = BlockKind::SepConv;
                else if (e.value == "maxpool")
                    b.kind = BlockKind::MaxPool;
                else
                    throw ConfigError("unknown block kind '" + e.value + "'", index);
            } else if (e.key == "kernel") {
                b.kernel = positive(e, index);
            } else if (e.key == "stride") {
                b.stride = positive(e, index);
            } else if (e.key == "repeat") {
                b.repeat = positive(e, index);
            } else if (e.key == "pool_kernel") {
                b.pool_kernel = positive(e, index);
            } else if (e.key == "channels") {
                for (auto c : parse_int_list(e.key, e.value)) {
                    if (c < 1) throw ConfigError("channel counts must be >= 1", index);
                    b.channels.push_back(static_cast<std::size_t>(c));
                }
            } else if (e.key == "residual") {
                b.residual = parse_bool(e.key, e.value);
            } else if (e.key == "bias") {
                b.bias = parse_bool(e.key, e.value);
            } else if (e.key == "padding") {
                if (e.value == "same")
                    b.padding = ad::Padding::Same;
                else if (e.value == "valid")
                    b.padding = ad::Padding::Valid;
                else
                    throw ConfigError("padding must be 'same' or 'valid'", index);
            } else {
                throw ConfigError("unknown key '" + e.key + "'", index);
            }
        }
        validate_block(b, index);
        cfg.blocks.push_back(std::move(b));
        ++index;
    }
    return cfg;
}

BackboneConfig BackboneConfig::load(const std::filesystem::path& path) {
    return parse(read_text_file(path));
}

std::string BackboneConfig::to_text() const {
    std::ostringstream os;
    os << "input = " << input.height << ", " << input.width << ", " << input.channels << "\n";
    for (const auto& b : blocks) {
        os << "\n[block]\nkind = " << kind_name(b.kind) << "\nkernel = " << b.kernel << "\nstride = " << b.stride
           << "\n";
        if (b.kind != BlockKind::MaxPool) {
            os << "channels = ";
            for (std::size_t i = 0; i < b.channels.size(); ++i) os << (i ? ", " : "") << b.channels[i];
            os << "\nrepeat = " << b.repeat << "\nresidual = " << (b.residual ? "true" : "false")
               << "\nbias = " << (b.bias ? "true" : "false") << "\n";
        }
        os << "padding = " << (b.padding == ad::Padding::Same ? "same" : "valid") << "\n";
        if (b.kind == BlockKind::SepConv) os << "pool_kernel = " << b.pool_kernel << "\n";
    }
    return os.str();
}

std::vector<FeatureShape> infer_shapes(const BackboneConfig& config) {
    std::vector<FeatureShape> shapes;
    FeatureShape s = config.input;
    if (s.height == 0 || s.width == 0 || s.channels == 0) throw ConfigError("input shape must be positive");
    int index = 0;
    for (const auto& b : config.blocks) {
        validate_block(b, index);
        const FeatureShape out = main_path_shape(b, s, index);
        if (b.residual && needs_projection(s, out)) {
            const std::size_t h = out_extent(s.height, 1, b.stride, ad::Padding::Valid, index);
            const std::size_t w = out_extent(s.width, 1, b.stride, ad::Padding::Valid, index);
            if (h != out.height || w != out.width)
                throw ConfigError("residual shortcut " + std::to_string(h) + "x" + std::to_string(w) +
                                      " cannot match block output " + to_string(out),
                                  index);
        }
        shapes.push_back(out);
        s = out;
        ++index;
    }
    return shapes;
}

FeatureShape output_shape(const BackboneConfig& config) {
    const auto shapes = infer_shapes(config);
    return shapes.empty() ? config.input : shapes.back();
}

std::vector<ParamSpec> param_specs(const BackboneConfig& config) {
    const auto shapes = infer_shapes(config);
    std::vector<ParamSpec> specs;
    FeatureShape in = config.input;
    for (std::size_t i = 0; i < config.blocks.size(); ++i) {
        const Block& b = config.blocks[i];
        const std::string prefix = "b" + std::to_string(i);
        const std::size_t k = b.kernel;
        std::size_t c = in.channels;
        for (std::size_t j = 0; b.kind != BlockKind::MaxPool && j < b.repeat; ++j) {
            const std::string lp = prefix + ".l" + std::to_string(j);
            const std::size_t co = b.layer_channels(j);
            if (b.kind == BlockKind::Conv) {
                specs.push_back({lp + ".kernel", {co, c, k, k}, c * k * k, co * k * k, true});
            } else {
                specs.push_back({lp + ".depthwise", {c, k, k}, k * k, k * k, true});
                specs.push_back({lp + ".pointwise", {co, c}, c, co, true});
            }
            if (b.bias) specs.push_back({lp + ".bias", {co}, 0, 0, false});
            c = co;
        }
        if (b.residual && needs_projection(in, shapes[i])) {
            const std::size_t co = shapes[i].channels;
            specs.push_back({prefix + ".shortcut.kernel", {co, in.channels, 1, 1}, in.channels, co, true});
            if (b.bias) specs.push_back({prefix + ".shortcut.bias", {co}, 0, 0, false});
        }
        in = shapes[i];
    }
    return specs;
}

std::size_t param_count(const BackboneConfig& config) {
    std::size_t n = 0;
    for (const auto& s : param_specs(config)) n += numel(s.shape);
    return n;
}

template <typename T>
ad::Var forward(ad::Tape<T>& tape, const BackboneConfig& config, std::span<const ad::Var> params, ad::Var image) {
    const Shape& is = tape.shape(image);
    const FeatureShape& in_shape = config.input;
    if (is != Shape{in_shape.channels, in_shape.height, in_shape.width})
        throw ShapeError("backbone: input tensor " + shape_string(is) + " does not match configured input " +
                         to_string(in_shape));
    const auto shapes = infer_shapes(config);
    std::size_t next = 0;
    auto take = [&]() {
        if (next >= params.size()) throw ShapeError("backbone: too few parameter tensors for config");
        return params[next++];
    };

    ad::Var x = image;
    FeatureShape in = in_shape;
    for (std::size_t i = 0; i < config.blocks.size(); ++i) {
        const Block& b = config.blocks[i];
        if (b.kind == BlockKind::MaxPool) {
            x = ad::max_pool(tape, x, b.kernel, b.stride, b.padding);
            in = shapes[i];
            continue;
        }
        const ad::Var block_in = x;
        for (std::size_t j = 0; j < b.repeat; ++j) {
            const bool last = j + 1 == b.repeat;
            if (b.kind == BlockKind::Conv) {
                const ad::Var w = take();
                const std::optional<ad::Var> bias = b.bias ? std::optional<ad::Var>(take()) : std::nullopt;
                x = ad::conv2d(tape, x, w, bias, j == 0 ? b.stride : 1, b.padding);
            } else {
                const ad::Var wd = take();
                const ad::Var wp = take();
                const std::optional<ad::Var> bias = b.bias ? std::optional<ad::Var>(take()) : std::nullopt;
                x = ad::separable_conv2d(tape, x, wd, wp, bias, 1, b.padding);
            }
            if (!(last && b.residual)) x = ad::relu(tape, x);
        }
        if (b.kind == BlockKind::SepConv && b.stride > 1)
            x = ad::max_pool(tape, x, b.pool_kernel, b.stride, ad::Padding::Same);
        if (b.residual) {
            ad::Var shortcut = block_in;
            if (needs_projection(in, shapes[i])) {
                const ad::Var w = take();
                const std::optional<ad::Var> bias = b.bias ? std::optional<ad::Var>(take()) : std::nullopt;
                shortcut = ad::conv2d(tape, block_in, w, bias, b.stride, ad::Padding::Valid);
            }
            x = ad::relu(tape, ad::residual_add(tape, x, shortcut));
        }
        in = shapes[i];
    }
    if (next != params.size()) throw ShapeError("backbone: too many parameter tensors for config");
    return x;
}

template ad::Var forward<float>(ad::Tape<float>&, const BackboneConfig&, std::span<const ad::Var>, ad::Var);
template ad::Var forward<double>(ad::Tape<double>&, const BackboneConfig&, std::span<const ad::Var>, ad::Var);

}  // namespace siamcut::backbone

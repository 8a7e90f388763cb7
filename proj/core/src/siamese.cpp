// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/siamese.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "siamcut/errors.hpp"
#include "siamcut/imaging.hpp"
#include "siamcut/ops.hpp"

namespace siamcut::siamese {

std::size_t head_param_count(std::size_t input_size) {
    std::size_t n = 0, in = input_size;
    for (auto w : kHeadWidths) {
        n += in * w + w;
        in = w;
    }
    return n;
}

template <typename T>
Model<T> Model<T>::allocate(backbone::BackboneConfig config) {
    Model m;
    m.specs_ = backbone::param_specs(config);
    m.backbone_tensors_ = m.specs_.size();
    m.head_input_ = backbone::output_shape(config).size();
    std::size_t in = m.head_input_;
    for (std::size_t i = 0; i < kHeadWidths.size(); ++i) {
        const std::size_t w = kHeadWidths[i];
        const std::string p = "head.dense" + std::to_string(i);
        m.specs_.push_back({p + ".kernel", {w, in}, in, w, true});
        m.specs_.push_back({p + ".bias", {w}, 0, 0, false});
        in = w;
    }
    m.config_ = std::move(config);
    return m;
}

template <typename T>
Model<T> Model<T>::build(backbone::BackboneConfig config, Rng& init_rng) {
    Model m = allocate(std::move(config));
    for (const auto& s : m.specs_) {
        if (s.is_kernel) {
            m.params_.push_back(ad::xavier_uniform<T>(s.shape, s.fan_in, s.fan_out, init_rng));
        } else {
            Tensor<T> t(s.shape);
            t.requires_grad = true;
            m.params_.push_back(std::move(t));
        }
    }
    return m;
}

template <typename T>
Model<T> Model<T>::zeros(backbone::BackboneConfig config) {
    Model m = allocate(std::move(config));
    for (const auto& s : m.specs_) {
        Tensor<T> t(s.shape);
        t.requires_grad = true;
        m.params_.push_back(std::move(t));
    }
    return m;
}

template <typename T>
std::size_t Model<T>::param_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
}

template <typename T>
Tensor<T>& Model<T>::param(std::string_view name) {
    for (std::size_t i = 0; i < specs_.size(); ++i)
        if (specs_[i].name == name) return params_[i];
    throw InvalidInput("no parameter named '" + std::string(name) + "'");
}

template <typename T>
const Tensor<T>& Model<T>::param(std::string_view name) const {
    return const_cast<Model*>(this)->param(name);
}

template <typename T>
std::vector<std::size_t> Model<T>::head_kernel_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = backbone_tensors_; i < specs_.size(); ++i)
        if (specs_[i].is_kernel) out.push_back(i);
    return out;
}

template <typename T>
std::vector<ad::Var> bind_parameters(ad::Tape<T>& tape, Model<T>& model) {
    std::vector<ad::Var> vars;
    for (auto& p : model.params()) vars.push_back(tape.parameter(p));
    return vars;
}

template <typename T>
std::vector<ad::Var> bind_constants(ad::Tape<T>& tape, const Model<T>& model) {
    std::vector<ad::Var> vars;
    for (const auto& p : model.params()) vars.push_back(tape.constant(p));
    return vars;
}

template <typename T>
ad::Var features(ad::Tape<T>& tape, const Model<T>& model, std::span<const ad::Var> params, ad::Var image) {
    return backbone::forward(tape, model.config(), params.first(model.backbone_tensor_count()), image);
}

template <typename T>
ad::Var head(ad::Tape<T>& tape, const Model<T>& model, std::span<const ad::Var> params, ad::Var features_a,
             ad::Var features_b) {
    auto head_params = params.subspan(model.backbone_tensor_count());
    ad::Var x = ad::flatten(tape, ad::subtract(tape, features_a, features_b));
    for (std::size_t i = 0; i < kHeadWidths.size(); ++i) {
        x = ad::dense(tape, x, head_params[2 * i], head_params[2 * i + 1]);
        x = i + 1 < kHeadWidths.size() ? ad::relu(tape, x) : ad::sigmoid(tape, x);
    }
    return x;
}

template <typename T>
ad::Var pair_probability(ad::Tape<T>& tape, const Model<T>& model, std::span<const ad::Var> params, ad::Var a,
                         ad::Var b) {
    if (tape.shape(a) != tape.shape(b))
        throw ShapeError("forward_pair: image shapes " + shape_string(tape.shape(a)) + " and " +
                         shape_string(tape.shape(b)) + " differ");
    const ad::Var fa = features(tape, model, params, a);
    const ad::Var fb = features(tape, model, params, b);
    return head(tape, model, params, fa, fb);
}

template <typename T>
T forward_pair(const Model<T>& model, const Tensor<T>& a, const Tensor<T>& b) {
    ad::Tape<T> tape;
    const auto params = bind_constants(tape, model);
    const ad::Var va = tape.constant(a);
    const ad::Var vb = tape.constant(b);
    return tape.item(pair_probability(tape, model, std::span<const ad::Var>(params), va, vb));
}

Tensor<float> to_network_input(const Image& rgb, std::size_t height, std::size_t width) {
    if (rgb.channels() != 3) throw InvalidInput("network input must be a 3-channel image");
    const Image sized = imaging::resize_bilinear(rgb, static_cast<int>(width), static_cast<int>(height));
    const Image ycc = imaging::rgb_to_ycbcr(sized);
    Tensor<float> t(Shape{3, height, width});
    const std::size_t plane = height * width;
    for (std::size_t i = 0; i < plane; ++i)
        for (std::size_t c = 0; c < 3; ++c) t.values[c * plane + i] = ycc.data()[i * 3 + c] / 255.0f;
    return t;
}

template class Model<float>;
template class Model<double>;
template std::vector<ad::Var> bind_parameters<float>(ad::Tape<float>&, Model<float>&);
template std::vector<ad::Var> bind_parameters<double>(ad::Tape<double>&, Model<double>&);
template std::vector<ad::Var> bind_constants<float>(ad::Tape<float>&, const Model<float>&);
template std::vector<ad::Var> bind_constants<double>(ad::Tape<double>&, const Model<double>&);
template ad::Var features<float>(ad::Tape<float>&, const Model<float>&, std::span<const ad::Var>, ad::Var);
template ad::Var features<double>(ad::Tape<double>&, const Model<double>&, std::span<const ad::Var>, ad::Var);
template ad::Var head<float>(ad::Tape<float>&, const Model<float>&, std::span<const ad::Var>, ad::Var, ad::Var);
template ad::Var head<double>(ad::Tape<double>&, const Model<double>&, std::span<const ad::Var>, ad::Var, ad::Var);
template ad::Var pair_probability<float>(ad::Tape<float>&, const Model<float>&, std::span<const ad::Var>, ad::Var,
                                         ad::Var);
template ad::Var pair_probability<double>(ad::Tape<double>&, const Model<double>&, std::span<const ad::Var>,
                                          ad::Var, ad::Var);
template float forward_pair<float>(const Model<float>&, const Tensor<float>&, const Tensor<float>&);
template double forward_pair<double>(const Model<double>&, const Tensor<double>&, const Tensor<double>&);

// ---------------------------------------------------------------------------
// Checkpoint encoding

namespace {

constexpr char kMagic[5] = {'H', 'N', 'E', 'T', '1'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::span<const std::uint8_t> bytes(std::size_t n) {
        if (in_.size() - pos_ < n) throw TruncatedFile("checkpoint truncated");
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8() { return bytes(1)[0]; }
    std::uint32_t u32() {
        auto b = bytes(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        auto b = bytes(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto n = u32();
        auto b = bytes(n);
        return std::string(b.begin(), b.end());
    }
    bool at_end() const { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const Model<float>& model, const TrainingState* state) {
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.str(model.config().to_text());
    const auto params = model.params();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        w.str(model.specs()[i].name);
        w.u32(static_cast<std::uint32_t>(params[i].shape.size()));
        for (auto d : params[i].shape) w.u32(static_cast<std::uint32_t>(d));
        for (float v : params[i].values) w.f32(v);
    }
    w.u8(state ? 1 : 0);
    if (state) {
        const auto& a = state->adam;
        w.u32(state->epoch);
        w.f64(a.lr);
        w.f64(a.decay);
        w.u64(a.step);
        w.u32(static_cast<std::uint32_t>(a.m.size()));
        for (std::size_t i = 0; i < a.m.size(); ++i) {
            w.u32(static_cast<std::uint32_t>(a.m[i].size()));
            for (float v : a.m[i]) w.f32(v);
            for (float v : a.v[i]) w.f32(v);
        }
    }
    return w.take();
}

Checkpoint deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        if (bytes.size() < sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, bytes.size()) == 0)
            throw TruncatedFile("checkpoint truncated inside magic");
        throw BadMagic("not a checkpoint (bad magic)");
    }
    Reader r(bytes.subspan(sizeof(kMagic)));
    backbone::BackboneConfig config;
    try {
        config = backbone::BackboneConfig::parse(r.str());
    } catch (const ConfigError& e) {
        throw CheckpointShapeMismatch(std::string("checkpoint config invalid: ") + e.what());
    }
    Model<float> model = Model<float>::zeros(config);
    const std::uint32_t count = r.u32();
    if (count != model.params().size())
        throw CheckpointShapeMismatch("checkpoint holds " + std::to_string(count) + " tensors, config needs " +
                                      std::to_string(model.params().size()));
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = r.str();
        const std::uint32_t rank = r.u32();
        if (rank > 8) throw CheckpointShapeMismatch("tensor '" + name + "' has implausible rank");
        Shape shape(rank);
        for (auto& d : shape) d = r.u32();
        const auto& spec = model.specs()[i];
        if (name != spec.name || shape != spec.shape)
            throw CheckpointShapeMismatch("tensor " + std::to_string(i) + " is '" + name + "' " + shape_string(shape) +
                                          ", config expects '" + spec.name + "' " + shape_string(spec.shape));
        auto& t = model.params()[i];
        for (auto& v : t.values) v = r.f32();
    }
    Checkpoint ck{std::move(model), std::nullopt};
    if (r.u8()) {
        TrainingState st;
        st.epoch = r.u32();
        st.adam.lr = r.f64();
        st.adam.decay = r.f64();
        st.adam.step = r.u64();
        const std::uint32_t n = r.u32();
        if (n != 0 && n != ck.model.params().size())
            throw CheckpointShapeMismatch("optimizer state tensor count does not match model");
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t len = r.u32();
            if (len != ck.model.params()[i].size())
                throw CheckpointShapeMismatch("optimizer state size mismatch for tensor " + std::to_string(i));
            std::vector<float> m(len), v(len);
            for (auto& e : m) e = r.f32();
            for (auto& e : v) e = r.f32();
            st.adam.m.push_back(std::move(m));
            st.adam.v.push_back(std::move(v));
        }
        ck.state = std::move(st);
    }
    if (!r.at_end()) throw DataError("checkpoint has trailing bytes");
    return ck;
}

void save(const std::filesystem::path& path, const Model<float>& model, const TrainingState* state) {
    const auto bytes = serialize(model, state);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

Checkpoint load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace siamcut::siamese

// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include "siamcut/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "siamcut/errors.hpp"

namespace siamcut {

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || (channels != 1 && channels != 3))
        throw InvalidInput("image must have non-negative size and 1 or 3 channels");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 0 || height < 0 || (channels != 1 && channels != 3))
        throw InvalidInput("image must have non-negative size and 1 or 3 channels");
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw InvalidInput("image data length does not match width*height*channels");
}

Image Image::channel(int c) const {
    if (c < 0 || c >= channels_) throw InvalidInput("channel index out of range");
    Image out(width_, height_, 1);
    for (std::size_t i = 0, n = static_cast<std::size_t>(width_) * height_; i < n; ++i)
        out.data_[i] = data_[i * channels_ + c];
    return out;
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
}

BinaryMask BinaryMask::inverted() const {
    BinaryMask out = *this;
    for (auto& b : out.bits_) b = b ? 0 : 1;
    return out;
}

Image BinaryMask::to_image() const {
    Image img(width_, height_, 1);
    for (std::size_t i = 0; i < bits_.size(); ++i) img.data()[i] = bits_[i] ? 255 : 0;
    return img;
}

BinaryMask BinaryMask::from_image(const Image& img) {
    if (img.channels() != 1) throw InvalidInput("mask image must be single-channel");
    BinaryMask m(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) m.bits_[i] = img.data()[i] ? 1 : 0;
    return m;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) throw InvalidInput("iou: mask sizes differ");
    std::size_t inter = 0, uni = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            const bool p = a.at(x, y), q = b.at(x, y);
            inter += p && q;
            uni += p || q;
        }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Reads one whitespace-delimited header token, skipping `#` comments.
    std::string token() {
        skip_space_and_comments();
        std::string t;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
            if (bytes_[pos_] == '#') break;
            t.push_back(static_cast<char>(bytes_[pos_++]));
        }
        if (t.empty()) throw MalformedHeader("PNM header ended early");
        return t;
    }

    int number() {
        const std::string t = token();
        int v = 0;
        for (char c : t) {
            if (!std::isdigit(static_cast<unsigned char>(c))) throw MalformedHeader("PNM header: bad number '" + t + "'");
            v = v * 10 + (c - '0');
            if (v > 1 << 24) throw MalformedHeader("PNM header: number too large");
        }
        return v;
    }

    // Exactly one whitespace byte separates the header from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw MalformedHeader("PNM header: missing separator before raster");
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Image decode_pnm(std::span<const std::uint8_t> bytes) {
    HeaderReader r(bytes);
    const std::string magic = r.token();
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else if (magic.size() == 2 && magic[0] == 'P')
        throw UnsupportedFormat("PNM variant " + magic + " is not supported (binary P5/P6 only)");
    else
        throw MalformedHeader("not a PNM file");
    const int width = r.number();
    const int height = r.number();
    const int maxval = r.number();
    if (width <= 0 || height <= 0) throw MalformedHeader("PNM header: zero dimension");
    if (maxval != 255) throw UnsupportedFormat("PNM maxval " + std::to_string(maxval) + " is not supported");
    const std::size_t offset = r.raster_offset();
    const std::size_t need = static_cast<std::size_t>(width) * height * channels;
    if (bytes.size() < offset + need) throw TruncatedFile("PNM raster truncated");
    std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + need));
    return Image(width, height, channels, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const Image& img) {
    const std::string header = std::string(img.channels() == 1 ? "P5" : "P6") + "\n" + std::to_string(img.width()) +
                               " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

Image read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_pnm(bytes);
    } catch (const DataError& e) {
        // Keep the concrete type; prefix the path.
        if (dynamic_cast<const TruncatedFile*>(&e)) throw TruncatedFile(path.string() + ": " + e.what());
        if (dynamic_cast<const UnsupportedFormat*>(&e)) throw UnsupportedFormat(path.string() + ": " + e.what());
        throw MalformedHeader(path.string() + ": " + e.what());
    }
}

void write_image(const Image& img, const std::filesystem::path& path) {
    const auto bytes = encode_pnm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write image " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace siamcut

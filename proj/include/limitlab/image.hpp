#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

namespace limitlab {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// Fixed-size RGB raster with deterministic byte-level writers. PPM (P6) is
/// the bit-exact baseline; PNG is a convenience re-encode.
class Image {
public:
    Image(int width, int height) : w_(width), h_(height), px_(static_cast<std::size_t>(width) * height) {}

    int width() const { return w_; }
    int height() const { return h_; }

    Rgb& at(int x, int y) { return px_[static_cast<std::size_t>(y) * w_ + x]; }
    const Rgb& at(int x, int y) const { return px_[static_cast<std::size_t>(y) * w_ + x]; }

    void write_ppm(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path);
        out << "P6\n" << w_ << " " << h_ << "\n255\n";
        out.write(reinterpret_cast<const char*>(px_.data()), static_cast<std::streamsize>(px_.size() * 3));
        if (!out) throw std::runtime_error("write failed: " + path);
    }

    void write_png(const std::string& path) const {
        // raw scanlines with filter byte 0
        std::vector<std::uint8_t> raw;
        raw.reserve(static_cast<std::size_t>(h_) * (static_cast<std::size_t>(w_) * 3 + 1));
        for (int y = 0; y < h_; ++y) {
            raw.push_back(0);
            for (int x = 0; x < w_; ++x) {
                const Rgb& p = at(x, y);
                raw.push_back(p.r);
                raw.push_back(p.g);
                raw.push_back(p.b);
            }
        }
        uLongf bound = compressBound(static_cast<uLong>(raw.size()));
        std::vector<std::uint8_t> packed(bound);
        if (compress2(packed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
            throw std::runtime_error("png deflate failed");
        packed.resize(bound);

        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path);
        static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
        out.write(reinterpret_cast<const char*>(sig), 8);
        auto chunk = [&](const char* type, const std::vector<std::uint8_t>& data) {
            auto be32 = [](std::uint32_t v) {
                return std::string{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                   static_cast<char>(v >> 8), static_cast<char>(v)};
            };
            out << be32(static_cast<std::uint32_t>(data.size()));
            std::vector<std::uint8_t> body(4 + data.size());
            std::copy(type, type + 4, body.begin());
            std::copy(data.begin(), data.end(), body.begin() + 4);
            out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
            std::uint32_t crc = static_cast<std::uint32_t>(
                crc32(0, body.data(), static_cast<uInt>(body.size())));
            out << be32(crc);
        };
        std::vector<std::uint8_t> ihdr(13, 0);
        auto put32 = [&](std::size_t off, std::uint32_t v) {
            ihdr[off] = static_cast<std::uint8_t>(v >> 24);
            ihdr[off + 1] = static_cast<std::uint8_t>(v >> 16);
            ihdr[off + 2] = static_cast<std::uint8_t>(v >> 8);
            ihdr[off + 3] = static_cast<std::uint8_t>(v);
        };
        put32(0, static_cast<std::uint32_t>(w_));
        put32(4, static_cast<std::uint32_t>(h_));
        ihdr[8] = 8;    // bit depth
        ihdr[9] = 2;    // truecolor
        chunk("IHDR", ihdr);
        chunk("IDAT", packed);
        chunk("IEND", {});
        if (!out) throw std::runtime_error("write failed: " + path);
    }

private:
    int w_, h_;
    std::vector<Rgb> px_;
};

/// fixed escape-time palette: bounded points black, escape steps cycle a
/// smooth ramp; pure integer mapping so renders are reproducible bytes
inline Rgb escape_color(int step, int max_iter) {
    if (step < 0 || step > max_iter) return {0, 0, 0};
    int t = (step * 255) / (max_iter > 0 ? max_iter : 1);
    return {static_cast<std::uint8_t>(40 + (t * 3) % 216), static_cast<std::uint8_t>((t * 7) % 250),
            static_cast<std::uint8_t>(255 - t)};
}

} // namespace limitlab

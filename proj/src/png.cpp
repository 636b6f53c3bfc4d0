#include "ldct/png.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include <zlib.h>

namespace ldct {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32_be(out, crc);
}

} // namespace

void write_png_gray8(const std::string& path, const Tensor& image_hw, double lo, double hi) {
    if (image_hw.ndim() != 2) throw ShapeMismatch("write_png_gray8: expected {H,W}");
    if (!(hi > lo)) throw ConfigError("write_png_gray8: hi must exceed lo");
    const int H = image_hw.dim(0), W = image_hw.dim(1);

    // Filter byte 0 per scanline, then raw gray bytes.
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(H) * (W + 1));
    const double s = 255.0 / (hi - lo);
    for (int y = 0; y < H; ++y) {
        raw[static_cast<std::size_t>(y) * (W + 1)] = 0;
        for (int x = 0; x < W; ++x) {
            const double v = std::clamp((image_hw.at(y, x) - lo) * s, 0.0, 255.0);
            raw[static_cast<std::size_t>(y) * (W + 1) + 1 + x] =
                static_cast<std::uint8_t>(std::lround(v));
        }
    }

    uLongf comp_size = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(comp_size);
    if (::compress2(compressed.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw DataError("write_png_gray8: deflate failed");
    compressed.resize(comp_size);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(W));
    put_u32_be(ihdr, static_cast<std::uint32_t>(H));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(0); // grayscale
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", compressed);
    append_chunk(png, "IEND", {});

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("write_png_gray8: cannot open " + path);
    const std::size_t wrote = std::fwrite(png.data(), 1, png.size(), f);
    std::fclose(f);
    if (wrote != png.size()) throw DataError("write_png_gray8: short write to " + path);
}

} // namespace ldct

#include "ldct/tensor.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace ldct {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u32(std::FILE* f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    std::fwrite(b, 1, 4, f);
}

bool get_u32(std::FILE* f, std::uint32_t& v) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

} // namespace

void write_tensor(const Tensor& t, const std::string& path, DType dtype) {
    if (t.ndim() == 0) throw DimMismatch("write_tensor: dims must be nonempty");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw DataError("write_tensor: cannot open " + path);
    std::fwrite(kTensorMagic, 1, 8, f.get());
    put_u32(f.get(), static_cast<std::uint32_t>(t.ndim()));
    for (int d : t.shape()) put_u32(f.get(), static_cast<std::uint32_t>(d));
    put_u32(f.get(), static_cast<std::uint32_t>(dtype));
    if (dtype == DType::f64) {
        // Host is little-endian; doubles go out verbatim.
        std::fwrite(t.data(), sizeof(double), static_cast<std::size_t>(t.numel()), f.get());
    } else {
        std::vector<float> buf(static_cast<std::size_t>(t.numel()));
        for (std::int64_t i = 0; i < t.numel(); ++i) buf[static_cast<std::size_t>(i)] = static_cast<float>(t[i]);
        std::fwrite(buf.data(), sizeof(float), buf.size(), f.get());
    }
    if (std::ferror(f.get())) throw DataError("write_tensor: short write to " + path);
}

Tensor read_tensor(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw DataError("read_tensor: cannot open " + path);
    char magic[8];
    if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kTensorMagic, 8) != 0)
        throw BadMagic("read_tensor: bad magic in " + path);
    std::uint32_t ndim = 0;
    if (!get_u32(f.get(), ndim)) throw TruncatedPayload("read_tensor: truncated header in " + path);
    if (ndim == 0 || ndim > 8) throw DimMismatch("read_tensor: unsupported ndim in " + path);
    std::vector<int> shape(ndim);
    std::int64_t numel = 1;
    for (std::uint32_t i = 0; i < ndim; ++i) {
        std::uint32_t d = 0;
        if (!get_u32(f.get(), d)) throw TruncatedPayload("read_tensor: truncated dims in " + path);
        if (d == 0 || d > (1u << 24)) throw DimMismatch("read_tensor: invalid dim in " + path);
        shape[i] = static_cast<int>(d);
        numel *= d;
    }
    std::uint32_t dtype = 0;
    if (!get_u32(f.get(), dtype)) throw TruncatedPayload("read_tensor: truncated header in " + path);
    if (dtype > 1) throw DimMismatch("read_tensor: unknown dtype code in " + path);

    Tensor t(shape);
    if (static_cast<DType>(dtype) == DType::f64) {
        std::size_t got = std::fread(t.data(), sizeof(double), static_cast<std::size_t>(numel), f.get());
        if (got != static_cast<std::size_t>(numel))
            throw TruncatedPayload("read_tensor: payload shorter than header claims in " + path);
    } else {
        std::vector<float> buf(static_cast<std::size_t>(numel));
        std::size_t got = std::fread(buf.data(), sizeof(float), buf.size(), f.get());
        if (got != buf.size())
            throw TruncatedPayload("read_tensor: payload shorter than header claims in " + path);
        for (std::int64_t i = 0; i < numel; ++i) t[i] = static_cast<double>(buf[static_cast<std::size_t>(i)]);
    }
    return t;
}

} // namespace ldct

#include "ldct/dicom.hpp"

#include <cstdio>
#include <cstring>
#include <optional>

namespace ldct::ctio {

namespace {

constexpr const char* kImplicitLE = "1.2.840.10008.1.2";
constexpr const char* kExplicitLE = "1.2.840.10008.1.2.1";

struct Cursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    bool has(std::size_t n) const { return pos + n <= bytes.size(); }
    std::uint16_t u16() {
        std::uint16_t v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v = static_cast<std::uint32_t>(bytes[pos]) |
                          (static_cast<std::uint32_t>(bytes[pos + 1]) << 8) |
                          (static_cast<std::uint32_t>(bytes[pos + 2]) << 16) |
                          (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
        pos += 4;
        return v;
    }
};

struct Element {
    std::uint16_t group = 0;
    std::uint16_t elem = 0;
    std::string vr; // empty under implicit VR
    std::span<const std::uint8_t> value;
    bool undefined_length = false;
};

bool vr_has_long_length(const std::string& vr) {
    return vr == "OB" || vr == "OW" || vr == "OF" || vr == "OL" || vr == "SQ" || vr == "UC" ||
           vr == "UR" || vr == "UT" || vr == "UN";
}

// Reads one element header + value span; explicit_vr selects the encoding.
std::optional<Element> read_element(Cursor& c, bool explicit_vr) {
    if (!c.has(8)) return std::nullopt;
    Element e;
    e.group = c.u16();
    e.elem = c.u16();
    std::uint32_t length = 0;
    if (e.group == 0xFFFE) {
        // Item / delimitation tags carry no VR in either encoding.
        length = c.u32();
    } else if (explicit_vr) {
        if (!c.has(4)) throw MalformedFile("dicom: truncated element header");
        e.vr.assign(reinterpret_cast<const char*>(c.bytes.data() + c.pos), 2);
        c.pos += 2;
        if (vr_has_long_length(e.vr)) {
            c.pos += 2; // reserved
            if (!c.has(4)) throw MalformedFile("dicom: truncated element header");
            length = c.u32();
        } else {
            length = c.u16();
        }
    } else {
        if (!c.has(4)) throw MalformedFile("dicom: truncated element header");
        length = c.u32();
    }
    if (length == 0xFFFFFFFFu) {
        e.undefined_length = true;
        return e;
    }
    if (!c.has(length)) throw MalformedFile("dicom: element value runs past end of file");
    e.value = c.bytes.subspan(c.pos, length);
    c.pos += length;
    return e;
}

// Skips an undefined-length sequence by walking items until the sequence
// delimiter. Nested undefined-length items are walked recursively.
void skip_undefined_sequence(Cursor& c, bool explicit_vr) {
    while (true) {
        if (!c.has(8)) throw MalformedFile("dicom: unterminated sequence");
        auto e = read_element(c, explicit_vr);
        if (!e) throw MalformedFile("dicom: unterminated sequence");
        if (e->group == 0xFFFE && e->elem == 0xE0DD) return; // sequence delimiter
        if (e->undefined_length) skip_undefined_sequence(c, explicit_vr);
    }
}

std::string trimmed_string(std::span<const std::uint8_t> v) {
    std::string s(reinterpret_cast<const char*>(v.data()), v.size());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
    std::size_t start = s.find_first_not_of(' ');
    return start == std::string::npos ? std::string() : s.substr(start);
}

double parse_decimal(std::span<const std::uint8_t> v, const char* what) {
    const std::string s = trimmed_string(v);
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw MalformedFile(std::string("dicom: unparsable numeric value for ") + what);
    }
}

std::uint16_t parse_us(std::span<const std::uint8_t> v, const char* what) {
    if (v.size() < 2) throw MalformedFile(std::string("dicom: short US value for ") + what);
    return static_cast<std::uint16_t>(v[0] | (v[1] << 8));
}

} // namespace

CTSlice parse_dicom_slice(std::span<const std::uint8_t> file_bytes) {
    if (file_bytes.size() < 132) throw MalformedFile("dicom: file shorter than preamble");
    if (std::memcmp(file_bytes.data() + 128, "DICM", 4) != 0)
        throw MalformedFile("dicom: missing DICM marker");

    Cursor c{file_bytes, 132};

    // File meta group is always explicit VR little endian.
    std::string transfer_syntax = kExplicitLE;
    while (c.has(8)) {
        const std::size_t mark = c.pos;
        auto e = read_element(c, true);
        if (!e) break;
        if (e->group != 0x0002) {
            c.pos = mark;
            break;
        }
        if (e->elem == 0x0010) transfer_syntax = trimmed_string(e->value);
    }

    bool explicit_vr = true;
    if (transfer_syntax == kImplicitLE)
        explicit_vr = false;
    else if (transfer_syntax != kExplicitLE)
        throw UnsupportedEncoding("dicom: transfer syntax " + transfer_syntax +
                                  " not supported (compressed or big-endian)");

    std::optional<int> rows, cols, bits_allocated, pixel_representation;
    std::optional<double> slope, intercept, kvp, thickness;
    std::optional<int> instance_number;
    std::string series_id;
    std::span<const std::uint8_t> pixel_data;
    bool have_pixel_data = false;

    while (c.has(8)) {
        auto e = read_element(c, explicit_vr);
        if (!e) break;
        if (e->undefined_length) {
            if (e->group == 0x7FE0 && e->elem == 0x0010)
                throw UnsupportedEncoding("dicom: encapsulated pixel data not supported");
            skip_undefined_sequence(c, explicit_vr);
            continue;
        }
        if (e->group == 0x0028 && e->elem == 0x0010) rows = parse_us(e->value, "Rows");
        else if (e->group == 0x0028 && e->elem == 0x0011) cols = parse_us(e->value, "Columns");
        else if (e->group == 0x0028 && e->elem == 0x0100) bits_allocated = parse_us(e->value, "BitsAllocated");
        else if (e->group == 0x0028 && e->elem == 0x0103)
            pixel_representation = parse_us(e->value, "PixelRepresentation");
        else if (e->group == 0x0028 && e->elem == 0x1052) intercept = parse_decimal(e->value, "RescaleIntercept");
        else if (e->group == 0x0028 && e->elem == 0x1053) slope = parse_decimal(e->value, "RescaleSlope");
        else if (e->group == 0x0018 && e->elem == 0x0060) kvp = parse_decimal(e->value, "KVP");
        else if (e->group == 0x0018 && e->elem == 0x0050) thickness = parse_decimal(e->value, "SliceThickness");
        else if (e->group == 0x0020 && e->elem == 0x0013)
            instance_number = static_cast<int>(parse_decimal(e->value, "InstanceNumber"));
        else if (e->group == 0x0020 && e->elem == 0x000E) series_id = trimmed_string(e->value);
        else if (e->group == 0x0028 && e->elem == 0x0008) {
            if (parse_decimal(e->value, "NumberOfFrames") != 1.0)
                throw UnsupportedEncoding("dicom: multi-frame objects not supported");
        } else if (e->group == 0x7FE0 && e->elem == 0x0010) {
            pixel_data = e->value;
            have_pixel_data = true;
        }
    }

    if (!have_pixel_data) throw MissingTag("dicom: no pixel data element");
    if (!rows || !cols) throw MissingTag("dicom: missing Rows/Columns");
    if (!slope || !intercept) throw MissingTag("dicom: missing rescale slope/intercept");

    const int bits = bits_allocated.value_or(16);
    const bool is_signed = pixel_representation.value_or(0) == 1;
    const std::size_t count = static_cast<std::size_t>(*rows) * static_cast<std::size_t>(*cols);

    Tensor pixels({*rows, *cols});
    if (bits == 16) {
        if (pixel_data.size() < count * 2) throw MissingTag("dicom: pixel data shorter than Rows*Columns");
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint16_t raw =
                static_cast<std::uint16_t>(pixel_data[2 * i] | (pixel_data[2 * i + 1] << 8));
            const double stored = is_signed ? static_cast<double>(static_cast<std::int16_t>(raw))
                                            : static_cast<double>(raw);
            pixels[static_cast<std::int64_t>(i)] = stored * *slope + *intercept;
        }
    } else if (bits == 8) {
        if (pixel_data.size() < count) throw MissingTag("dicom: pixel data shorter than Rows*Columns");
        for (std::size_t i = 0; i < count; ++i) {
            const double stored = is_signed ? static_cast<double>(static_cast<std::int8_t>(pixel_data[i]))
                                            : static_cast<double>(pixel_data[i]);
            pixels[static_cast<std::int64_t>(i)] = stored * *slope + *intercept;
        }
    } else {
        throw UnsupportedEncoding("dicom: BitsAllocated must be 8 or 16");
    }

    CTSlice slice;
    slice.pixels = std::move(pixels);
    slice.rows = *rows;
    slice.cols = *cols;
    slice.kv = static_cast<int>(kvp.value_or(0.0));
    slice.thickness_mm = thickness.value_or(0.0);
    slice.slice_index = instance_number.value_or(0);
    slice.series_id = series_id;
    slice.validate();
    return slice;
}

CTSlice parse_dicom_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return parse_dicom_slice(bytes);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open " + path);
    std::fseek(f, 0, SEEK_END);
    const long size = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size < 0 ? 0 : size));
    const std::size_t got = std::fread(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (got != bytes.size()) throw DataError("short read from " + path);
    return bytes;
}

} // namespace ldct::ctio

#pragma once

// Minimal DICOM byte builder for test fixtures: single-frame CT, little
// endian, explicit or implicit VR.

#include <cstdint>
#include <string>
#include <vector>

namespace ldct::testing {

class DicomBuilder {
  public:
    explicit DicomBuilder(bool explicit_vr = true) : explicit_vr_(explicit_vr) {
        bytes_.assign(128, 0);
        bytes_.push_back('D');
        bytes_.push_back('I');
        bytes_.push_back('C');
        bytes_.push_back('M');
        // File meta group: transfer syntax UID only (enough for the parser).
        const std::string ts = explicit_vr_ ? "1.2.840.10008.1.2.1" : "1.2.840.10008.1.2";
        add_meta_ui(0x0002, 0x0010, ts);
    }

    // Meta group stays explicit VR regardless of the dataset encoding.
    void add_meta_ui(std::uint16_t group, std::uint16_t elem, std::string value) {
        if (value.size() % 2) value.push_back('\0');
        tag(group, elem);
        bytes_.push_back('U');
        bytes_.push_back('I');
        u16(static_cast<std::uint16_t>(value.size()));
        for (char c : value) bytes_.push_back(static_cast<std::uint8_t>(c));
    }

    void add_string(std::uint16_t group, std::uint16_t elem, const char vr[2], std::string value) {
        if (value.size() % 2) value.push_back(' ');
        tag(group, elem);
        if (explicit_vr_) {
            bytes_.push_back(static_cast<std::uint8_t>(vr[0]));
            bytes_.push_back(static_cast<std::uint8_t>(vr[1]));
            u16(static_cast<std::uint16_t>(value.size()));
        } else {
            u32(static_cast<std::uint32_t>(value.size()));
        }
        for (char c : value) bytes_.push_back(static_cast<std::uint8_t>(c));
    }

    void add_us(std::uint16_t group, std::uint16_t elem, std::uint16_t value) {
        tag(group, elem);
        if (explicit_vr_) {
            bytes_.push_back('U');
            bytes_.push_back('S');
            u16(2);
        } else {
            u32(2);
        }
        u16(value);
    }

    void add_pixels(const std::vector<std::int16_t>& stored) {
        tag(0x7FE0, 0x0010);
        const std::uint32_t len = static_cast<std::uint32_t>(stored.size() * 2);
        if (explicit_vr_) {
            bytes_.push_back('O');
            bytes_.push_back('W');
            u16(0); // reserved
            u32(len);
        } else {
            u32(len);
        }
        for (std::int16_t v : stored) u16(static_cast<std::uint16_t>(v));
    }

    // A complete CT slice with the tags the parser requires.
    static std::vector<std::uint8_t> ct_slice(int rows, int cols, const std::vector<std::int16_t>& stored,
                                              double slope, double intercept, bool explicit_vr = true,
                                              int kv = 120, double thickness = 1.0, int instance = 1,
                                              const std::string& series = "1.2.3.4") {
        DicomBuilder b(explicit_vr);
        b.add_string(0x0018, 0x0050, "DS", std::to_string(thickness));
        b.add_string(0x0018, 0x0060, "DS", std::to_string(kv));
        b.add_string(0x0020, 0x000E, "UI", series);
        b.add_string(0x0020, 0x0013, "IS", std::to_string(instance));
        b.add_us(0x0028, 0x0010, static_cast<std::uint16_t>(rows));
        b.add_us(0x0028, 0x0011, static_cast<std::uint16_t>(cols));
        b.add_us(0x0028, 0x0100, 16);
        b.add_us(0x0028, 0x0103, 1);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", intercept);
        b.add_string(0x0028, 0x1052, "DS", buf);
        std::snprintf(buf, sizeof buf, "%g", slope);
        b.add_string(0x0028, 0x1053, "DS", buf);
        b.add_pixels(stored);
        return b.bytes_;
    }

    std::vector<std::uint8_t> bytes() const { return bytes_; }

  private:
    void tag(std::uint16_t group, std::uint16_t elem) {
        u16(group);
        u16(elem);
    }
    void u16(std::uint16_t v) {
        bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes_.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        bytes_.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        bytes_.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
    }

    bool explicit_vr_;
    std::vector<std::uint8_t> bytes_;
};

} // namespace ldct::testing

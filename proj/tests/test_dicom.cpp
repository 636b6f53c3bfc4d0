#include <doctest.h>

#include "ldct/dicom.hpp"
#include "support/dicom_writer.hpp"

using namespace ldct;
using namespace ldct::ctio;
using ldct::testing::DicomBuilder;

TEST_CASE("stored value 0 with slope 1 intercept -1024 parses to -1024 HU") {
    const auto bytes = DicomBuilder::ct_slice(2, 2, {0, 0, 0, 0}, 1.0, -1024.0);
    const CTSlice s = parse_dicom_slice(bytes);
    CHECK(s.rows == 2);
    CHECK(s.cols == 2);
    for (std::int64_t i = 0; i < 4; ++i) CHECK(s.pixels[i] == -1024.0);
    CHECK(s.kv == 120);
    CHECK(s.thickness_mm == doctest::Approx(1.0));
    CHECK(s.series_id == "1.2.3.4");
}

TEST_CASE("stored value 1064 rescales to 40 HU") {
    const auto bytes = DicomBuilder::ct_slice(1, 2, {1064, 1064}, 1.0, -1024.0);
    const CTSlice s = parse_dicom_slice(bytes);
    CHECK(s.pixels[0] == 40.0);
}

TEST_CASE("signed stored values and fractional slope") {
    const auto bytes = DicomBuilder::ct_slice(1, 2, {-100, 50}, 2.0, 10.0);
    const CTSlice s = parse_dicom_slice(bytes);
    CHECK(s.pixels[0] == -190.0);
    CHECK(s.pixels[1] == 110.0);
}

TEST_CASE("implicit VR little endian parses as well") {
    const auto bytes = DicomBuilder::ct_slice(2, 2, {1, 2, 3, 4}, 1.0, 0.0, /*explicit_vr=*/false);
    const CTSlice s = parse_dicom_slice(bytes);
    CHECK(s.pixels[3] == 4.0);
}

TEST_CASE("file truncated before pixel data raises MissingTag") {
    auto bytes = DicomBuilder::ct_slice(8, 8, std::vector<std::int16_t>(64, 7), 1.0, 0.0);
    // Locate the pixel data tag (7FE0,0010) and cut just before it.
    for (std::size_t i = 132; i + 4 < bytes.size(); ++i) {
        if (bytes[i] == 0xE0 && bytes[i + 1] == 0x7F && bytes[i + 2] == 0x10 && bytes[i + 3] == 0x00) {
            bytes.resize(i);
            break;
        }
    }
    CHECK_THROWS_AS(parse_dicom_slice(bytes), MissingTag);
}

TEST_CASE("missing rescale tags raise MissingTag") {
    DicomBuilder b(true);
    b.add_us(0x0028, 0x0010, 1);
    b.add_us(0x0028, 0x0011, 1);
    b.add_us(0x0028, 0x0100, 16);
    b.add_us(0x0028, 0x0103, 1);
    b.add_pixels({42});
    CHECK_THROWS_AS(parse_dicom_slice(b.bytes()), MissingTag);
}

TEST_CASE("bad preamble raises MalformedFile") {
    auto bytes = DicomBuilder::ct_slice(1, 1, {0}, 1.0, 0.0);
    bytes[130] = 'X'; // clobber the DICM marker
    CHECK_THROWS_AS(parse_dicom_slice(bytes), MalformedFile);
    CHECK_THROWS_AS(parse_dicom_slice(std::vector<std::uint8_t>(16, 0)), MalformedFile);
}

TEST_CASE("compressed transfer syntax raises UnsupportedEncoding") {
    DicomBuilder b(true);
    // Overwrite the meta with a JPEG transfer syntax by building manually.
    DicomBuilder jpeg(true);
    auto bytes = jpeg.bytes();
    // Replace the transfer syntax value: rebuild from scratch instead.
    std::vector<std::uint8_t> out(128, 0);
    out.push_back('D');
    out.push_back('I');
    out.push_back('C');
    out.push_back('M');
    const std::string ts = "1.2.840.10008.1.2.4.70"; // JPEG lossless
    out.push_back(0x02);
    out.push_back(0x00);
    out.push_back(0x10);
    out.push_back(0x00);
    out.push_back('U');
    out.push_back('I');
    out.push_back(static_cast<std::uint8_t>(ts.size()));
    out.push_back(0);
    for (char c : ts) out.push_back(static_cast<std::uint8_t>(c));
    CHECK_THROWS_AS(parse_dicom_slice(out), UnsupportedEncoding);
}

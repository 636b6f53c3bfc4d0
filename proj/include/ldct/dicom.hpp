#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldct/ctio.hpp"

namespace ldct::ctio {

// Minimal reader for uncompressed single-frame CT DICOM: implicit or explicit
// VR little endian, 8/16-bit pixel data, modality rescale applied to HU.
// Compressed transfer syntaxes and multi-frame objects are out of scope.
CTSlice parse_dicom_slice(std::span<const std::uint8_t> file_bytes);

CTSlice parse_dicom_file(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

} // namespace ldct::ctio

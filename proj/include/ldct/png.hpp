#pragma once

#include <string>

#include "ldct/tensor.hpp"

namespace ldct {

// 8-bit grayscale PNG for visual inspection. Values are clamped to [lo, hi]
// and quantized to 0..255.
void write_png_gray8(const std::string& path, const Tensor& image_hw, double lo, double hi);

} // namespace ldct

#pragma once

#include <string>

#include "acai/common.hpp"

namespace acai::io {

// 8-bit RGB PNG. Values are quantized with round(v*255) on write and mapped
// back as u8/255 on read.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

}  // namespace acai::io

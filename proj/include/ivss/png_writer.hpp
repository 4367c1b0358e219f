#pragma once

#include <cstdint>
#include <vector>

#include "ivss/frame_io.hpp"

namespace ivss {

// 8-bit RGB PNG, in memory.
std::vector<std::uint8_t> encode_png(const FrameRGB& frame);

}  // namespace ivss

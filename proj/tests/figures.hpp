#pragma once

// Worked three-color and four-block image examples, as 4x4 frames with a
// 2x2 block grid (each block 2x2 pixels).

#include <array>
#include <vector>

#include "ivss/frame_io.hpp"

namespace figures {

using ivss::FrameRGB;
using ivss::Rgb;

inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kGray{128, 128, 128};

// Builds a 4x4 frame from four blocks (NW, NE, SW, SE) of four pixels each,
// listed row-major within the block.
inline FrameRGB from_blocks(const std::array<std::array<Rgb, 4>, 4>& blocks) {
  std::vector<Rgb> px(16);
  for (int b = 0; b < 4; ++b) {
    const int bx = (b % 2) * 2, by = (b / 2) * 2;
    for (int i = 0; i < 4; ++i) px[std::size_t((by + i / 2) * 4 + bx + i % 2)] = blocks[b][i];
  }
  return FrameRGB(4, 4, std::move(px));
}

// Image A: 4 black, 4 white, 8 gray; every block holds 1 black, 1 white, 2 gray.
inline FrameRGB image_a() {
  const std::array<Rgb, 4> block{kBlack, kWhite, kGray, kGray};
  return from_blocks({block, block, block, block});
}

// Image B: 3 black, 6 white, 7 gray. Block histograms, in quarters (K, W, G):
// NW (1,3,0), NE (0,1,3), SW (1,2,1), SE (1,0,3). Against A's (1,1,2) blocks the
// per-block Euclidean distances are sqrt(8)/4, sqrt(2)/4, sqrt(2)/4, sqrt(2)/4,
// summing to 5*sqrt(2)/4 = 1.7678.
inline FrameRGB image_b() {
  return from_blocks({{{kBlack, kWhite, kWhite, kWhite},
                       {kWhite, kGray, kGray, kGray},
                       {kBlack, kWhite, kWhite, kGray},
                       {kBlack, kGray, kGray, kGray}}});
}

inline constexpr Rgb kRed{255, 0, 0};
inline constexpr Rgb kGreen{0, 255, 0};
inline constexpr Rgb kBlue{0, 0, 255};
inline constexpr Rgb kYellow{255, 255, 0};

inline FrameRGB solid_blocks(Rgb nw, Rgb ne, Rgb sw, Rgb se) {
  return from_blocks({{{nw, nw, nw, nw}, {ne, ne, ne, ne}, {sw, sw, sw, sw}, {se, se, se, se}}});
}

// D: NW red, NE green, SW blue, SE black. Rotated clockwise by 90 degrees it
// becomes NW blue, NE red, SW black, SE green.
inline FrameRGB image_d() { return solid_blocks(kRed, kGreen, kBlue, kBlack); }

// E matches the rotated D in its top row and differs in the two bottom blocks.
inline FrameRGB image_e() { return solid_blocks(kBlue, kRed, kWhite, kYellow); }

}  // namespace figures

#pragma once

#include <cstdint>
#include <vector>

namespace htmsp {

/// 8-bit grayscale image, row-major.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayFrame() = default;
  GrayFrame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const GrayFrame&) const = default;
};

}  // namespace htmsp

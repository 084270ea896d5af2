#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace enstrect {

// Grayscale raster, 8- or 16-bit; values in [0, 2^bit_depth - 1].
struct GrayImage {
  int width = 0, height = 0;
  int bit_depth = 16;
  std::vector<std::uint16_t> pixels;  // row-major

  double max_value() const { return bit_depth == 16 ? 65535.0 : 255.0; }
};

GrayImage read_png_gray(const std::string& path);
void write_png_gray(const GrayImage& image, const std::string& path);

}  // namespace enstrect

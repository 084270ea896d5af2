#include "enstrect/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

GrayImage read_png_gray(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw ValidationError("png: cannot open '" + path + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ProcessingError("png: reader allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ProcessingError("png: info allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("png: '" + path + "' is not a valid PNG file");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("png: '" + path + "' is not grayscale");
  }
  int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  if (bit_depth == 16) png_set_swap(png);  // file is big-endian
  png_read_update_info(png, info);

  GrayImage img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = bit_depth;
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);

  std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
  for (int y = 0; y < img.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    if (bit_depth == 16) {
      const auto* src = reinterpret_cast<const std::uint16_t*>(row.data());
      for (int x = 0; x < img.width; ++x)
        img.pixels[static_cast<std::size_t>(y) * img.width + x] = src[x];
    } else {
      for (int x = 0; x < img.width; ++x)
        img.pixels[static_cast<std::size_t>(y) * img.width + x] = row[x];
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png_gray(const GrayImage& image, const std::string& path) {
  if (image.bit_depth != 8 && image.bit_depth != 16)
    throw ValidationError("png: bit depth must be 8 or 16");
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
    throw ValidationError("png: image dimensions inconsistent with pixel buffer");

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw ValidationError("png: cannot open '" + path + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ProcessingError("png: writer allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw ProcessingError("png: info allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ProcessingError("png: write failed for '" + path + "'");
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, image.bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (image.bit_depth == 16) png_set_swap(png);

  if (image.bit_depth == 16) {
    std::vector<std::uint16_t> row(image.width);
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x)
        row[x] = image.pixels[static_cast<std::size_t>(y) * image.width + x];
      png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
    }
  } else {
    std::vector<std::uint8_t> row(image.width);
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x)
        row[x] = static_cast<std::uint8_t>(
            image.pixels[static_cast<std::size_t>(y) * image.width + x]);
      png_write_row(png, row.data());
    }
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace enstrect

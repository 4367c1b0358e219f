#include "ivss/png_writer.hpp"

#include <png.h>

#include "ivss/error.hpp"

namespace ivss {

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void no_flush(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const FrameRGB& frame) {
  if (frame.empty()) throw EmptyFrameError("cannot encode an empty frame");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png_create_info_struct failed");
  }

  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(frame.height());
  // Rgb is three packed bytes, so each row of pixels is already a PNG row.
  static_assert(sizeof(Rgb) == 3);
  auto* base = const_cast<png_bytep>(reinterpret_cast<const std::uint8_t*>(frame.pixels().data()));
  for (std::uint32_t y = 0; y < frame.height(); ++y) rows[y] = base + std::size_t(y) * frame.width() * 3;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, no_flush);
  png_set_IHDR(png, info, frame.width(), frame.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace ivss

#include <png.h>

#include <cstdio>
#include <memory>

#include "propimg/error.hpp"
#include "propimg/pit.hpp"

namespace propimg {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(const std::filesystem::path& path, const char* what) {
  throw Error(ErrorCode::IoFailure, std::string(what) + " " + path.string());
}

}  // namespace

void write_png(const Image& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "PNG export needs 1 or 3 channels");
  }
  if (image.rows() == 0 || image.cols() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "PNG export of an empty image");
  }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) png_fail(path, "cannot create");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) png_fail(path, "libpng init failed for");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    png_fail(path, "libpng write failed for");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols()),
               static_cast<png_uint_32>(image.rows()), 8,
               image.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = image.cols() * image.channels();
  const auto bytes = image.bytes();
  for (std::size_t r = 0; r < image.rows(); ++r) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + r * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) png_fail(path, "cannot open");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) png_fail(path, "libpng init failed for");
  png_infop info = png_create_info_struct(png);
  // Declared before setjmp so longjmp does not skip its destructor.
  Image image;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    png_fail(path, "libpng read failed for");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth != 8 || (color != PNG_COLOR_TYPE_RGB && color != PNG_COLOR_TYPE_GRAY)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::ShapeMismatch, "only 8-bit gray/RGB PNGs are supported");
  }
  image = Image(height, width, color == PNG_COLOR_TYPE_RGB ? 3 : 1);
  const std::size_t stride = std::size_t{width} * image.channels();
  for (std::size_t r = 0; r < height; ++r) {
    png_read_row(png, image.bytes().data() + r * stride, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

}  // namespace propimg

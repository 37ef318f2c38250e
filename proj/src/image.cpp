#include "dmcn/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace dmcn {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

float clamp01(float v) { return std::min(1.0f, std::max(0.0f, v)); }

unsigned char to_byte(float v) {
  return static_cast<unsigned char>(std::lround(clamp01(v) * 255.0f));
}

}  // namespace

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw parse_error("read_png: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw parse_error("read_png: " + path + " is not a valid PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_expand(png);  // palettes and low bit depths to 8-bit
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int channels = static_cast<int>(png_get_channels(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw parse_error("read_png: " + path + " has unsupported channel count " +
                      std::to_string(channels));
  }

  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height *
                                 channels);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = raw.data() + static_cast<std::size_t>(y) * width * channels;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(width, height, channels);
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.samples[i] = raw[i] / 255.0f;
  return img;
}

void write_png(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw contract_error("write_png: only 1 or 3 channels supported");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("write_png: cannot open " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(static_cast<std::size_t>(img.width) *
                                 img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        row[static_cast<std::size_t>(x) * img.channels + c] =
            to_byte(img.at(y, x, c));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image rgb_to_luminance(const Image& img) {
  if (img.channels != 3)
    throw contract_error("rgb_to_luminance: image is already single-channel");
  Image out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(y, x) = 0.299f * img.at(y, x, 0) + 0.587f * img.at(y, x, 1) +
                     0.114f * img.at(y, x, 2);
  return out;
}

void rgb_to_ycbcr(const Image& rgb, Image& y, Image& cb, Image& cr) {
  if (rgb.channels != 3) throw contract_error("rgb_to_ycbcr: need 3 channels");
  y = Image(rgb.width, rgb.height, 1);
  cb = Image(rgb.width, rgb.height, 1);
  cr = Image(rgb.width, rgb.height, 1);
  for (int i = 0; i < rgb.height; ++i)
    for (int j = 0; j < rgb.width; ++j) {
      const float r = rgb.at(i, j, 0), g = rgb.at(i, j, 1), b = rgb.at(i, j, 2);
      y.at(i, j) = 0.299f * r + 0.587f * g + 0.114f * b;
      cb.at(i, j) = 0.5f + (b - y.at(i, j)) * 0.564f;
      cr.at(i, j) = 0.5f + (r - y.at(i, j)) * 0.713f;
    }
}

Image ycbcr_to_rgb(const Image& y, const Image& cb, const Image& cr) {
  Image out(y.width, y.height, 3);
  for (int i = 0; i < y.height; ++i)
    for (int j = 0; j < y.width; ++j) {
      const float yy = y.at(i, j);
      const float pb = cb.at(i, j) - 0.5f, pr = cr.at(i, j) - 0.5f;
      out.at(i, j, 0) = clamp01(yy + pr / 0.713f);
      out.at(i, j, 2) = clamp01(yy + pb / 0.564f);
      out.at(i, j, 1) =
          clamp01((yy - 0.299f * out.at(i, j, 0) - 0.114f * out.at(i, j, 2)) /
                  0.587f);
    }
  return out;
}

TensorF image_to_tensor(const Image& img) {
  TensorF t(1, img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) t.at(0, c, y, x) = img.at(y, x, c);
  return t;
}

Image tensor_to_image(const TensorF& t, int item) {
  Image img(t.shape.w, t.shape.h, t.shape.c);
  for (int c = 0; c < t.shape.c; ++c)
    for (int y = 0; y < t.shape.h; ++y)
      for (int x = 0; x < t.shape.w; ++x) img.at(y, x, c) = t.at(item, c, y, x);
  return img;
}

}  // namespace dmcn

#pragma once

#include <string>
#include <vector>

#include "dmcn/tensor.hpp"

namespace dmcn {

// Raster image with samples normalized to [0, 1], interleaved row-major
// (y, x, channel).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  std::vector<float> samples;

  Image() = default;
  Image(int w, int h, int c)
      : width(w), height(h), channels(c),
        samples(static_cast<std::size_t>(w) * h * c, 0.0f) {}

  float& at(int y, int x, int c = 0) {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c = 0) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// 8-bit grayscale or RGB PNG.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img);

// Y = 0.299 R + 0.587 G + 0.114 B
Image rgb_to_luminance(const Image& img);

// Full YCbCr split/merge, used to carry chroma through single-channel SR.
void rgb_to_ycbcr(const Image& rgb, Image& y, Image& cb, Image& cr);
Image ycbcr_to_rgb(const Image& y, const Image& cb, const Image& cr);

// Bridging helpers between images and the tensor engine.
TensorF image_to_tensor(const Image& img);
Image tensor_to_image(const TensorF& t, int item = 0);

}  // namespace dmcn

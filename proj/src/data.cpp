#include "dmcn/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dmcn/rng.hpp"

namespace dmcn {
namespace {

// Keys cubic-convolution kernel, a = -0.5 (Catmull-Rom).
double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
  return 0.0;
}

int clamp_index(int i, int n) { return std::min(n - 1, std::max(0, i)); }

// One separable pass along x: (in_w x h x c) -> (out_w x h x c), double
// precision accumulation, no clamping.
std::vector<double> resample_axis(const std::vector<double>& src, int in_w,
                                  int rows, int ch, int out_w) {
  std::vector<double> dst(static_cast<std::size_t>(out_w) * rows * ch, 0.0);
  const double step = static_cast<double>(in_w) / out_w;
  for (int ox = 0; ox < out_w; ++ox) {
    const double sx = (ox + 0.5) * step - 0.5;
    const int base = static_cast<int>(std::floor(sx));
    double w[4];
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      w[k] = cubic_weight(sx - (base - 1 + k));
      sum += w[k];
    }
    for (int k = 0; k < 4; ++k) w[k] /= sum;
    int idx[4];
    for (int k = 0; k < 4; ++k) idx[k] = clamp_index(base - 1 + k, in_w);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k)
          acc += w[k] *
                 src[(static_cast<std::size_t>(r) * in_w + idx[k]) * ch + c];
        dst[(static_cast<std::size_t>(r) * out_w + ox) * ch + c] = acc;
      }
  }
  return dst;
}

std::vector<double> transpose(const std::vector<double>& src, int w, int h,
                              int ch) {
  std::vector<double> dst(src.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c)
        dst[(static_cast<std::size_t>(x) * h + y) * ch + c] =
            src[(static_cast<std::size_t>(y) * w + x) * ch + c];
  return dst;
}

}  // namespace

Image bicubic_resize(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1)
    throw contract_error("bicubic_resize: target dims must be >= 1");
  std::vector<double> buf(img.samples.begin(), img.samples.end());
  buf = resample_axis(buf, img.width, img.height, img.channels, out_w);
  buf = transpose(buf, out_w, img.height, img.channels);
  buf = resample_axis(buf, img.height, out_w, img.channels, out_h);
  buf = transpose(buf, out_h, out_w, img.channels);

  Image out(out_w, out_h, img.channels);
  for (std::size_t i = 0; i < buf.size(); ++i)
    out.samples[i] =
        static_cast<float>(std::min(1.0, std::max(0.0, buf[i])));
  return out;
}

std::pair<Image, Image> make_ilr(const Image& hr, const DegradationSpec& spec) {
  if (spec.scale < 2 || spec.scale > 4)
    throw contract_error("make_ilr: scale must be in {2, 3, 4}");
  const int multiple = std::lcm(spec.scale, 4);
  const int cw = (hr.width / multiple) * multiple;
  const int ch = (hr.height / multiple) * multiple;
  if (cw < multiple || ch < multiple)
    throw contract_error("make_ilr: image " + std::to_string(hr.width) + "x" +
                         std::to_string(hr.height) + " is too small; need at "
                         "least " + std::to_string(multiple) + " pixels per "
                         "side after cropping to a multiple of " +
                         std::to_string(multiple));

  Image cropped(cw, ch, hr.channels);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x)
      for (int c = 0; c < hr.channels; ++c)
        cropped.at(y, x, c) = hr.at(y, x, c);

  Image lr = bicubic_resize(cropped, cw / spec.scale, ch / spec.scale);
  Image ilr = bicubic_resize(lr, cw, ch);
  return {std::move(ilr), std::move(cropped)};
}

PatchSet extract_patches(const Image& hr, const Image& ilr,
                         const std::string& source, int size) {
  if (hr.width != ilr.width || hr.height != ilr.height ||
      hr.channels != ilr.channels)
    throw contract_error("extract_patches: hr and ilr dims differ");
  if (size < 1) throw contract_error("extract_patches: size must be >= 1");
  PatchSet set;
  for (int y = 0; y + size <= hr.height; y += size)
    for (int x = 0; x + size <= hr.width; x += size) {
      PatchPair p;
      p.hr = Image(size, size, hr.channels);
      p.ilr = Image(size, size, hr.channels);
      for (int dy = 0; dy < size; ++dy)
        for (int dx = 0; dx < size; ++dx)
          for (int c = 0; c < hr.channels; ++c) {
            p.hr.at(dy, dx, c) = hr.at(y + dy, x + dx, c);
            p.ilr.at(dy, dx, c) = ilr.at(y + dy, x + dx, c);
          }
      p.source = source;
      p.x = x;
      p.y = y;
      set.items.push_back(std::move(p));
    }
  return set;
}

DatasetSplit split_dataset(std::vector<std::string> paths, double ratio,
                           unsigned seed) {
  if (paths.empty()) throw contract_error("split_dataset: empty path list");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw contract_error("split_dataset: ratio must be in (0, 1)");
  std::sort(paths.begin(), paths.end());
  std::mt19937 gen(seed);
  deterministic_shuffle(paths, gen);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(paths.size())));
  DatasetSplit split;
  split.seed = seed;
  split.train_paths.assign(paths.begin(), paths.begin() + n_train);
  split.test_paths.assign(paths.begin() + n_train, paths.end());
  return split;
}

}  // namespace dmcn

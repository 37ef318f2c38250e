#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dmcn/image.hpp"

namespace dmcn {

struct DegradationSpec {
  int scale = 2;  // one of {2, 3, 4}
};

struct PatchPair {
  Image hr;   // size x size ground truth
  Image ilr;  // matching interpolated-LR patch
  std::string source;
  int x = 0;
  int y = 0;
};

struct PatchSet {
  std::vector<PatchPair> items;
};

struct DatasetSplit {
  std::vector<std::string> train_paths;
  std::vector<std::string> test_paths;
  unsigned seed = 0;
};

// Separable cubic-convolution resampling, Keys kernel a = -0.5, clamped
// edge sampling, output clamped to [0, 1].
Image bicubic_resize(const Image& img, int out_w, int out_h);

// Crops hr so its dims divide both the scale and 4, then degrades:
// LR = bicubic downscale by scale, ILR = bicubic upscale back.
std::pair<Image, Image> make_ilr(const Image& hr, const DegradationSpec& spec);

// Non-overlapping size x size tiles from the top-left; partial edge tiles
// are discarded.
PatchSet extract_patches(const Image& hr, const Image& ilr,
                         const std::string& source = "", int size = 48);

// Deterministic shuffle of the sorted input; first round(ratio*N) paths go
// to training.
DatasetSplit split_dataset(std::vector<std::string> paths, double ratio,
                           unsigned seed);

}  // namespace dmcn

#pragma once

#include <string>
#include <vector>

#include "dmcn/data.hpp"
#include "dmcn/image.hpp"
#include "dmcn/model.hpp"

namespace dmcn {

double psnr(const Image& a, const Image& b, double peak = 1.0);

// Mean SSIM over all positions where the full 11x11 Gaussian (sigma 1.5)
// window fits; C1 = (0.01 peak)^2, C2 = (0.03 peak)^2.  Single channel.
double ssim(const Image& a, const Image& b, double peak = 1.0);

struct EvalRow {
  std::string path;
  double psnr = 0;
  double ssim = 0;
};

struct EvalResult {
  std::string dataset;
  int scale = 2;
  std::string method;
  double mean_psnr = 0;
  double mean_ssim = 0;
  bool psnr_infinite = false;  // some per-image PSNR was infinite
  std::vector<EvalRow> rows;
  std::vector<std::string> skipped;  // per-image failures, not fatal
};

// Per image: make_ilr -> forward -> clamp -> metrics against hr_cropped.
// Returns the model result followed by the "Bicubic" baseline computed
// from the ILR itself.
std::vector<EvalResult> evaluate(const Model<float>& model,
                                 const std::vector<std::string>& test_paths,
                                 const DegradationSpec& spec,
                                 const std::string& dataset_name = "dataset");

// "34.19/0.8941" style cell.
std::string format_psnr_ssim(double psnr_db, double ssim_value,
                             bool infinite = false);

// Aligned plain-text table over the given results.
std::string format_table(const std::vector<EvalResult>& results);

// CSV: dataset,scale,method,psnr,ssim
std::string format_csv(const std::vector<EvalResult>& results);

}  // namespace dmcn

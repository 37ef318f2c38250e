#include "dmcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dmcn {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::vector<double> gaussian_window() {
  std::vector<double> w(kWindow);
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    w[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable Gaussian filtering restricted to valid rows/cols.
// src is height x width; output is (height - kWindow + 1) x (width - kWindow + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& kernel) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int k = 0; k < kWindow; ++k)
        acc += kernel[k] * src[static_cast<std::size_t>(y) * w + x + k];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int k = 0; k < kWindow; ++k)
        acc += kernel[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw contract_error("psnr: image dims differ");
  double mse = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.samples.size());
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b, double peak) {
  if (a.width != b.width || a.height != b.height)
    throw contract_error("ssim: image dims differ");
  if (a.channels != 1 || b.channels != 1)
    throw contract_error("ssim: single-channel images required (convert first)");
  if (a.width < kWindow || a.height < kWindow)
    throw contract_error("ssim: image smaller than the 11x11 window");

  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const int w = a.width, h = a.height;
  const std::size_t n = a.samples.size();

  std::vector<double> xa(n), xb(n), xaa(n), xbb(n), xab(n);
  for (std::size_t i = 0; i < n; ++i) {
    xa[i] = a.samples[i];
    xb[i] = b.samples[i];
    xaa[i] = xa[i] * xa[i];
    xbb[i] = xb[i] * xb[i];
    xab[i] = xa[i] * xb[i];
  }
  const auto kernel = gaussian_window();
  const auto mu_a = filter_valid(xa, w, h, kernel);
  const auto mu_b = filter_valid(xb, w, h, kernel);
  const auto raw_aa = filter_valid(xaa, w, h, kernel);
  const auto raw_bb = filter_valid(xbb, w, h, kernel);
  const auto raw_ab = filter_valid(xab, w, h, kernel);

  double acc = 0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = raw_aa[i] - ma * ma;
    const double vb = raw_bb[i] - mb * mb;
    const double cov = raw_ab[i] - ma * mb;
    acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
           ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

std::vector<EvalResult> evaluate(const Model<float>& model,
                                 const std::vector<std::string>& test_paths,
                                 const DegradationSpec& spec,
                                 const std::string& dataset_name) {
  if (test_paths.empty()) throw contract_error("evaluate: empty test set");
  EvalResult ours{dataset_name, spec.scale, "DMCN"};
  EvalResult baseline{dataset_name, spec.scale, "Bicubic"};

  for (const auto& path : test_paths) {
    try {
      Image img = read_png(path);
      if (img.channels == 3) img = rgb_to_luminance(img);
      auto [ilr, hr] = make_ilr(img, spec);

      TensorF out = model.forward(image_to_tensor(ilr));
      for (auto& v : out.data) v = std::min(1.0f, std::max(0.0f, v));
      Image sr = tensor_to_image(out);

      ours.rows.push_back({path, psnr(sr, hr), ssim(sr, hr)});
      baseline.rows.push_back({path, psnr(ilr, hr), ssim(ilr, hr)});
    } catch (const contract_error& e) {
      ours.skipped.push_back(path + ": " + e.what());
      baseline.skipped.push_back(path + ": " + e.what());
    }
  }
  for (EvalResult* r : {&ours, &baseline}) {
    double ps = 0, ss = 0;
    for (const auto& row : r->rows) {
      if (std::isinf(row.psnr)) r->psnr_infinite = true;
      ps += row.psnr;
      ss += row.ssim;
    }
    if (!r->rows.empty()) {
      r->mean_psnr = ps / r->rows.size();
      r->mean_ssim = ss / r->rows.size();
    }
  }
  return {std::move(ours), std::move(baseline)};
}

std::string format_psnr_ssim(double psnr_db, double ssim_value, bool infinite) {
  std::ostringstream os;
  if (infinite || std::isinf(psnr_db))
    os << "inf";
  else {
    os.setf(std::ios::fixed);
    os.precision(2);
    os << psnr_db;
  }
  os << "/";
  os.setf(std::ios::fixed);
  os.precision(4);
  os << ssim_value;
  return os.str();
}

std::string format_table(const std::vector<EvalResult>& results) {
  std::ostringstream os;
  os << "Dataset          Scale  Method    PSNR/SSIM\n";
  for (const auto& r : results) {
    std::ostringstream line;
    line << r.dataset;
    while (line.str().size() < 17) line << ' ';
    line << 'x' << r.scale << "     ";
    line << r.method;
    for (std::size_t i = r.method.size(); i < 10; ++i) line << ' ';
    line << format_psnr_ssim(r.mean_psnr, r.mean_ssim, r.psnr_infinite);
    os << line.str() << "\n";
  }
  return os.str();
}

std::string format_csv(const std::vector<EvalResult>& results) {
  std::ostringstream os;
  os << "dataset,scale,method,psnr,ssim\n";
  os.setf(std::ios::fixed);
  for (const auto& r : results) {
    os.precision(2);
    os << r.dataset << "," << r.scale << "," << r.method << ",";
    os << r.mean_psnr << ",";
    os.precision(4);
    os << r.mean_ssim << "\n";
  }
  return os.str();
}

}  // namespace dmcn

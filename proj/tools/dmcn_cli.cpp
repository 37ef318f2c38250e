// dmcn: single-image super-resolution toolkit.
//
// Subcommands: prepare, train, eval, sr, ablate, flops.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmcn/data.hpp"
#include "dmcn/image.hpp"
#include "dmcn/metrics.hpp"
#include "dmcn/model.hpp"
#include "dmcn/train.hpp"

namespace fs = std::filesystem;
using namespace dmcn;

namespace {

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  DegradationSpec degrade;
  double split_ratio = 0.8;
  std::string data;  // prepare: input image dir; train/ablate: prepared dir
  std::string out = ".";
};

// Flat key=value config file; '#' starts a comment; unknown keys are errors.
void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw contract_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t");
      const auto y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto as_int = [&] { return std::stoi(val); };
    auto as_double = [&] { return std::stod(val); };
    auto as_bool = [&]() -> bool {
      if (val == "true" || val == "1") return true;
      if (val == "false" || val == "0") return false;
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected boolean, got '" + val + "'");
    };
    try {
      if (key == "channels") cfg.model.channels = as_int();
      else if (key == "kernel") cfg.model.kernel = as_int();
      else if (key == "blocks_per_stage") cfg.model.blocks_per_stage = as_int();
      else if (key == "enable_local_memory") cfg.model.enable_local_memory = as_bool();
      else if (key == "enable_global_memory") cfg.model.enable_global_memory = as_bool();
      else if (key == "enable_hourglass") cfg.model.enable_hourglass = as_bool();
      else if (key == "input_channels") cfg.model.input_channels = as_int();
      else if (key == "seed") {
        cfg.model.seed = static_cast<unsigned>(std::stoul(val));
        cfg.train.seed = cfg.model.seed;
      } else if (key == "lr0") cfg.train.lr0 = as_double();
      else if (key == "decay_every_epochs") cfg.train.decay_every_epochs = as_int();
      else if (key == "decay_factor") cfg.train.decay_factor = as_double();
      else if (key == "batch_size") cfg.train.batch_size = as_int();
      else if (key == "beta1") cfg.train.beta1 = as_double();
      else if (key == "beta2") cfg.train.beta2 = as_double();
      else if (key == "epsilon") cfg.train.epsilon = as_double();
      else if (key == "weight_decay") cfg.train.weight_decay = as_double();
      else if (key == "epochs") cfg.train.epochs = as_int();
      else if (key == "scale") cfg.degrade.scale = as_int();
      else if (key == "split_ratio") cfg.split_ratio = as_double();
      else if (key == "data") cfg.data = val;
      else if (key == "out") cfg.out = val;
      else
        throw contract_error(path + ":" + std::to_string(lineno) +
                             ": unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": bad value '" + val + "' for key '" + key + "'");
    }
  }
}

std::vector<std::string> list_pngs(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw contract_error("not a readable directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

Image load_luminance(const std::string& path) {
  Image img = read_png(path);
  return img.channels == 3 ? rgb_to_luminance(img) : img;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------- prepare

int cmd_prepare(const RunConfig& cfg) {
  const auto paths = list_pngs(cfg.data);
  if (paths.empty()) throw contract_error("no PNG images found in " + cfg.data);
  fs::create_directories(cfg.out);
  const fs::path out(cfg.out);

  DatasetSplit split = split_dataset(paths, cfg.split_ratio, cfg.train.seed);
  auto write_list = [&](const std::string& name,
                        const std::vector<std::string>& list) {
    std::ofstream f(out / name);
    for (const auto& p : list) f << p << "\n";
  };
  write_list("train.txt", split.train_paths);
  write_list("test.txt", split.test_paths);

  std::ofstream manifest(out / "manifest.txt");
  std::size_t patch_count = 0;
  for (const auto& src : split.train_paths) {
    Image y = load_luminance(src);
    auto [ilr, hr] = make_ilr(y, cfg.degrade);
    PatchSet set = extract_patches(hr, ilr, src);
    for (const auto& p : set.items) {
      char hr_name[32], ilr_name[32];
      std::snprintf(hr_name, sizeof hr_name, "p%06zu_hr.png", patch_count);
      std::snprintf(ilr_name, sizeof ilr_name, "p%06zu_ilr.png", patch_count);
      write_png((out / hr_name).string(), p.hr);
      write_png((out / ilr_name).string(), p.ilr);
      manifest << p.source << " " << p.x << " " << p.y << "\n";
      ++patch_count;
    }
  }
  if (patch_count == 0)
    throw contract_error("no 48x48 patches could be extracted from " +
                         cfg.data);

  std::ostringstream summary;
  summary << "images: " << paths.size() << "\n"
          << "train: " << split.train_paths.size() << "\n"
          << "test: " << split.test_paths.size() << "\n"
          << "patches: " << patch_count << "\n"
          << "scale: " << cfg.degrade.scale << "\n"
          << "seed: " << cfg.train.seed << "\n";
  std::ofstream(out / "summary.txt") << summary.str();
  std::cout << summary.str();
  return 0;
}

// ------------------------------------------------------------------ train

PatchSet load_prepared(const std::string& dir) {
  const fs::path manifest = fs::path(dir) / "manifest.txt";
  if (!fs::exists(manifest))
    throw contract_error("missing manifest: " + manifest.string() +
                         " (run prepare first)");
  std::ifstream in(manifest);
  PatchSet set;
  std::string line;
  std::size_t idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    PatchPair p;
    if (!(row >> p.source >> p.x >> p.y))
      throw parse_error(manifest.string() + ": bad manifest line '" + line +
                        "'");
    char hr_name[32], ilr_name[32];
    std::snprintf(hr_name, sizeof hr_name, "p%06zu_hr.png", idx);
    std::snprintf(ilr_name, sizeof ilr_name, "p%06zu_ilr.png", idx);
    p.hr = read_png((fs::path(dir) / hr_name).string());
    p.ilr = read_png((fs::path(dir) / ilr_name).string());
    set.items.push_back(std::move(p));
    ++idx;
  }
  if (set.items.empty())
    throw contract_error("manifest is empty: " + manifest.string());
  return set;
}

int cmd_train(const RunConfig& cfg) {
  cfg.train.validate();
  PatchSet patches = load_prepared(cfg.data);
  fs::create_directories(cfg.out);
  const fs::path out(cfg.out);

  Model<float> model = build_model<float>(cfg.model);
  OptimizerState opt;
  std::vector<float> loss_history;
  std::ofstream history(out / "history.csv");
  history << "epoch,lr,loss\n";

  // One call per epoch: per-epoch seeding makes this bit-identical to a
  // single full run, and lets us checkpoint at every epoch boundary.
  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    TrainConfig one = cfg.train;
    one.epochs = epoch + 1;
    auto stats = train(model, patches, one, opt, epoch);
    for (const auto& s : stats) {
      history << s.epoch << "," << fmt(s.lr) << "," << fmt(s.mean_loss)
              << "\n";
      loss_history.push_back(static_cast<float>(s.mean_loss));
    }
    char name[40];
    std::snprintf(name, sizeof name, "checkpoint_epoch_%03d.dmcn", epoch + 1);
    save_checkpoint((out / name).string(), model, opt, epoch + 1,
                    loss_history);
  }
  history.flush();
  save_checkpoint((out / "model.dmcn").string(), model, opt, cfg.train.epochs,
                  loss_history);
  std::cout << "trained " << cfg.train.epochs << " epochs on "
            << patches.items.size() << " patches; final loss "
            << fmt(loss_history.empty() ? 0.0 : loss_history.back()) << "\n";
  return 0;
}

// ------------------------------------------------------------------- eval

int cmd_eval(const std::string& checkpoint_path, const RunConfig& cfg) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Model<float> model = restore_model(ckpt);

  std::vector<std::string> paths;
  if (fs::is_directory(cfg.data)) {
    paths = list_pngs(cfg.data);
  } else if (fs::exists(cfg.data)) {  // a test.txt list from prepare
    std::ifstream in(cfg.data);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) paths.push_back(line);
  }
  if (paths.empty())
    throw contract_error("no test images found at " + cfg.data);

  auto results = evaluate(model, paths, cfg.degrade,
                          fs::path(cfg.data).filename().string());
  std::cout << format_table(results);
  for (const auto& r : results)
    for (const auto& s : r.skipped)
      std::cerr << "skipped: " << s << "\n";

  fs::create_directories(cfg.out);
  std::ofstream(fs::path(cfg.out) / "report.csv") << format_csv(results);
  std::ofstream per_image(fs::path(cfg.out) / "per_image.csv");
  per_image << "path,method,psnr,ssim\n";
  for (const auto& r : results)
    for (const auto& row : r.rows)
      per_image << row.path << "," << r.method << "," << fmt(row.psnr) << ","
                << fmt(row.ssim) << "\n";
  return 0;
}

// --------------------------------------------------------------------- sr

int cmd_sr(const std::string& checkpoint_path, const std::string& image_path,
           bool assume_lr, const RunConfig& cfg) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Model<float> model = restore_model(ckpt);
  Image input = read_png(image_path);

  Image y, cb, cr;
  const bool color = input.channels == 3;
  if (color)
    rgb_to_ycbcr(input, y, cb, cr);
  else
    y = input;

  Image ilr;
  int out_w, out_h;
  if (assume_lr) {
    out_w = y.width * cfg.degrade.scale;
    out_h = y.height * cfg.degrade.scale;
    const int rem_w = out_w % 4, rem_h = out_h % 4;
    out_w -= rem_w;
    out_h -= rem_h;
    if (out_w < 4 || out_h < 4)
      throw contract_error("input image too small for --assume-lr");
    ilr = bicubic_resize(y, out_w, out_h);
  } else {
    auto [i, hr] = make_ilr(y, cfg.degrade);
    ilr = i;
    out_w = hr.width;
    out_h = hr.height;
  }

  TensorF x = image_to_tensor(ilr);
  TensorF pred = model.forward(x);
  for (auto& v : pred.data) v = std::min(1.0f, std::max(0.0f, v));
  Image sr = tensor_to_image(pred);

  Image result;
  if (color) {
    Image cb_up = bicubic_resize(cb, out_w, out_h);
    Image cr_up = bicubic_resize(cr, out_w, out_h);
    result = ycbcr_to_rgb(sr, cb_up, cr_up);
  } else {
    result = sr;
  }
  fs::create_directories(cfg.out);
  const std::string out_path =
      (fs::path(cfg.out) /
       (fs::path(image_path).stem().string() + "_sr.png"))
          .string();
  write_png(out_path, result);
  std::cout << "wrote " << out_path << " (" << result.width << "x"
            << result.height << ")\n";
  return 0;
}

// ----------------------------------------------------------------- ablate

ModelConfig variant_config(const ModelConfig& base, const std::string& name) {
  ModelConfig cfg = base;
  if (name == "full") return cfg;
  if (name == "no_local") { cfg.enable_local_memory = false; return cfg; }
  if (name == "no_global") { cfg.enable_global_memory = false; return cfg; }
  if (name == "no_memory") {
    cfg.enable_local_memory = false;
    cfg.enable_global_memory = false;
    return cfg;
  }
  if (name == "no_hourglass") { cfg.enable_hourglass = false; return cfg; }
  throw contract_error(
      "unknown variant '" + name +
      "' (expected full, no_local, no_global, no_memory, no_hourglass)");
}

int cmd_ablate(const std::vector<std::string>& variants,
               const RunConfig& cfg) {
  cfg.train.validate();
  for (const auto& v : variants) variant_config(cfg.model, v);  // validate
  PatchSet patches = load_prepared(cfg.data);
  fs::create_directories(cfg.out);

  std::vector<std::vector<EpochStats>> curves;
  int steps_per_epoch = 0;
  for (const auto& name : variants) {
    Model<float> model = build_model<float>(variant_config(cfg.model, name));
    OptimizerState opt;
    auto counter = [](int, int step, double, void* user) {
      *static_cast<int*>(user) = std::max(*static_cast<int*>(user), step);
    };
    int steps = 0;
    curves.push_back(
        train(model, patches, cfg.train, opt, 0, counter, &steps));
    steps_per_epoch = steps;
    std::cout << name << ": final loss " << fmt(curves.back().back().mean_loss)
              << "\n";
  }

  // Aligned loss curves; both epoch and cumulative-step axes are given.
  std::ofstream csv(fs::path(cfg.out) / "ablation.csv");
  csv << "epoch,step";
  for (const auto& name : variants) csv << "," << name;
  csv << "\n";
  for (int e = 0; e < cfg.train.epochs; ++e) {
    csv << (e + 1) << "," << (e + 1) * steps_per_epoch;
    for (const auto& curve : curves) csv << "," << fmt(curve[e].mean_loss);
    csv << "\n";
  }

  for (const auto& name : variants) {
    if (name != "no_hourglass") continue;
    const std::uint64_t full = estimate_flops(cfg.model, 48, 48).total;
    const std::uint64_t flat =
        estimate_flops(variant_config(cfg.model, name), 48, 48).total;
    std::cout << "flops full=" << full << " no_hourglass=" << flat
              << " reduction="
              << fmt(100.0 * (1.0 - static_cast<double>(full) / flat))
              << "%\n";
  }
  return 0;
}

// ------------------------------------------------------------------ flops

int cmd_flops(const RunConfig& cfg, int size) {
  FlopReport report = estimate_flops(cfg.model, size, size);
  FlopReport flat = estimate_flops_flat_equivalent(cfg.model, size, size);
  std::printf("%-22s %6s %3s %6s %8s %16s\n", "layer", "c", "f", "n", "m",
              "c*f^2*n*m");
  for (const auto& row : report.layers)
    std::printf("%-22s %6llu %3llu %6llu %8llu %16llu\n", row.name.c_str(),
                static_cast<unsigned long long>(row.c),
                static_cast<unsigned long long>(row.f),
                static_cast<unsigned long long>(row.n),
                static_cast<unsigned long long>(row.m),
                static_cast<unsigned long long>(row.term));
  std::printf("total: %llu\n",
              static_cast<unsigned long long>(report.total));
  std::printf("flat equivalent (all convs at %dx%d): %llu\n", size, size,
              static_cast<unsigned long long>(flat.total));
  std::printf("reduction: %.1f%%\n",
              100.0 * (1.0 - static_cast<double>(report.total) / flat.total));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DMCN single-image super-resolution toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  bool seed_set = false, scale_set = false;
  unsigned seed = 0;
  int scale = 2;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--scale", scale, "upscaling factor")
        ->check(CLI::IsMember({2, 3, 4}))
        ->each([&](const std::string&) { scale_set = true; });
    sub->add_option("--out", cfg.out, "output directory");
  };

  auto* prepare = app.add_subcommand("prepare", "build a patch dataset");
  prepare->add_option("--in", cfg.data, "directory of PNG images");
  prepare->add_option("--ratio", cfg.split_ratio, "train split ratio");
  add_shared(prepare);

  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", cfg.data, "prepared dataset directory");
  int epochs_flag = -1;
  train_cmd->add_option("--epochs", epochs_flag, "number of epochs");
  add_shared(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate against bicubic");
  std::string checkpoint_path, image_path;
  eval_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")
      ->required();
  eval_cmd->add_option("--data", cfg.data, "test image dir or list file");
  add_shared(eval_cmd);

  auto* sr_cmd = app.add_subcommand("sr", "super-resolve one image");
  sr_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")
      ->required();
  sr_cmd->add_option("--image", image_path, "input PNG")->required();
  bool assume_lr = false;
  sr_cmd->add_flag("--assume-lr", assume_lr,
                   "treat the input as LR and output scale x size");
  add_shared(sr_cmd);

  auto* ablate_cmd = app.add_subcommand("ablate", "compare variants");
  std::vector<std::string> variants{"full", "no_memory"};
  ablate_cmd->add_option("--variants", variants,
                         "full, no_local, no_global, no_memory, no_hourglass")
      ->delimiter(',');
  ablate_cmd->add_option("--data", cfg.data, "prepared dataset directory");
  ablate_cmd->add_option("--epochs", epochs_flag, "number of epochs");
  add_shared(ablate_cmd);

  auto* flops_cmd = app.add_subcommand("flops", "per-layer cost report");
  int input_size = 48;
  flops_cmd->add_option("--size", input_size, "square input size");
  add_shared(flops_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) load_config_file(config_path, cfg);
    if (seed_set) {
      cfg.model.seed = seed;
      cfg.train.seed = seed;
    }
    if (scale_set) cfg.degrade.scale = scale;
    if (epochs_flag >= 0) cfg.train.epochs = epochs_flag;
    if (cfg.degrade.scale < 2 || cfg.degrade.scale > 4)
      throw contract_error("scale must be 2, 3 or 4");

    if (app.got_subcommand(prepare)) return cmd_prepare(cfg);
    if (app.got_subcommand(train_cmd)) return cmd_train(cfg);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(checkpoint_path, cfg);
    if (app.got_subcommand(sr_cmd))
      return cmd_sr(checkpoint_path, image_path, assume_lr, cfg);
    if (app.got_subcommand(ablate_cmd)) return cmd_ablate(variants, cfg);
    if (app.got_subcommand(flops_cmd)) return cmd_flops(cfg, input_size);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

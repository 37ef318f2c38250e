#include "dmcn/model.hpp"

#include <map>
#include <set>

#include "dmcn/rng.hpp"

namespace dmcn {
namespace {

struct LayerPlan {
  LayerKind kind = LayerKind::Conv;
  std::string name;
  int in_ch = 0, out_ch = 0, stride = 1, padding = 0, factor = 1;
};

struct TopologyPlan {
  std::vector<LayerPlan> layers;
  std::vector<std::pair<int, int>> skips;
};

void validate(const ModelConfig& cfg) {
  if (cfg.channels < 1 || cfg.input_channels < 1)
    throw contract_error("ModelConfig: channel counts must be positive");
  if (cfg.kernel < 1 || cfg.kernel % 2 == 0)
    throw contract_error("ModelConfig: kernel must be a positive odd size");
  if (cfg.blocks_per_stage < 0)
    throw contract_error("ModelConfig: blocks_per_stage must be >= 0");
}

// Layout (hourglass enabled):
//   input conv -> down1 -> stage1 blocks -> down2 -> stage2 blocks
//              -> up1 -> stage3 blocks -> up2 -> output conv
// Each block is conv-relu-conv with a local additive skip around it.
// Down units: stride-2 conv, conv, relu.  Up units: nearest x2 resize
// followed by three conv-relu pairs.  Global memory ties the network input
// to the final output and each pre-down activation to its mirror post-up
// activation.
TopologyPlan plan_topology(const ModelConfig& cfg) {
  validate(cfg);
  TopologyPlan plan;
  const int C = cfg.channels;
  const int K = cfg.kernel;
  const int pad = (K - 1) / 2;
  int pos = 0;  // activation position: 0 = input, k = after layer k

  auto conv = [&](const std::string& name, int in, int out, int stride) {
    plan.layers.push_back({LayerKind::Conv, name, in, out, stride, pad, 1});
    ++pos;
  };
  auto act = [&](const std::string& name) {
    plan.layers.push_back({LayerKind::Relu, name, C, C, 1, 0, 1});
    ++pos;
  };
  auto block = [&](const std::string& name) {
    const int entry = pos;
    conv(name + ".conv1", C, C, 1);
    act(name + ".relu");
    conv(name + ".conv2", C, C, 1);
    if (cfg.enable_local_memory) plan.skips.emplace_back(entry, pos);
  };
  auto stage = [&](int idx) {
    for (int i = 0; i < cfg.blocks_per_stage; ++i)
      block("stage" + std::to_string(idx) + ".block" + std::to_string(i + 1));
  };
  auto down_unit = [&](const std::string& name) {
    conv(name + ".conv1", C, C, 2);
    conv(name + ".conv2", C, C, 1);
    act(name + ".relu");
  };
  auto up_unit = [&](const std::string& name) {
    plan.layers.push_back({LayerKind::Upsample, name + ".resize", C, C, 1, 0, 2});
    ++pos;
    for (int i = 0; i < 3; ++i) {
      conv(name + ".conv" + std::to_string(i + 1), C, C, 1);
      act(name + ".relu" + std::to_string(i + 1));
    }
  };

  conv("input", cfg.input_channels, C, 1);
  if (cfg.enable_hourglass) {
    const int pre_down1 = pos;
    down_unit("down1");
    stage(1);
    const int pre_down2 = pos;
    down_unit("down2");
    stage(2);
    up_unit("up1");
    const int post_up1 = pos;
    stage(3);
    up_unit("up2");
    const int post_up2 = pos;
    if (cfg.enable_global_memory) {
      plan.skips.emplace_back(pre_down2, post_up1);
      plan.skips.emplace_back(pre_down1, post_up2);
    }
  } else {
    stage(1);
    stage(2);
    stage(3);
  }
  conv("output", C, cfg.input_channels, 1);
  if (cfg.enable_global_memory) plan.skips.emplace_back(0, pos);
  return plan;
}

}  // namespace

int count_layers(const ModelConfig& config) {
  int count = 0;
  for (const auto& l : plan_topology(config).layers)
    if (l.kind != LayerKind::Upsample) ++count;
  return count;
}

template <typename T>
Model<T> build_model(const ModelConfig& config) {
  TopologyPlan plan = plan_topology(config);
  Model<T> model;
  model.config = config;
  model.skips = plan.skips;
  std::mt19937 gen(config.seed);
  for (const auto& lp : plan.layers) {
    Layer<T> layer;
    layer.kind = lp.kind;
    layer.name = lp.name;
    layer.factor = lp.factor;
    if (lp.kind == LayerKind::Conv) {
      layer.conv.weights =
          Tensor4<T>(lp.out_ch, lp.in_ch, config.kernel, config.kernel);
      layer.conv.bias.assign(lp.out_ch, T(0));
      layer.conv.stride = lp.stride;
      layer.conv.padding = lp.padding;
      // He fan-in scaling.  Residual-branch tails and the output conv get a
      // 0.1x factor so the network starts close to the identity carried by
      // the memory connections instead of amplifying variance per block.
      double stddev =
          std::sqrt(2.0 / (static_cast<double>(lp.in_ch) * config.kernel *
                           config.kernel));
      const bool branch_tail =
          config.enable_local_memory &&
          lp.name.find(".block") != std::string::npos &&
          lp.name.ends_with(".conv2");
      if (branch_tail || lp.name == "output") stddev *= 0.1;
      for (auto& v : layer.conv.weights.data)
        v = static_cast<T>(stddev * gaussian(gen));
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

template <typename T>
void Model<T>::check_input(const Shape& s) const {
  if (s.c != config.input_channels)
    throw contract_error("forward: input has " + std::to_string(s.c) +
                         " channels, model expects " +
                         std::to_string(config.input_channels));
  if (config.enable_hourglass && (s.h % 4 != 0 || s.w % 4 != 0))
    throw contract_error(
        "forward: hourglass model requires spatial dims divisible by 4, got " +
        s.str());
}

template <typename T>
Tensor4<T> Model<T>::forward(const Tensor4<T>& x) const {
  check_input(x.shape);
  std::set<int> wanted;  // skip sources still to be captured
  std::multimap<int, int> by_dst;
  for (const auto& [src, dst] : skips) {
    wanted.insert(src);
    by_dst.emplace(dst, src);
  }
  std::map<int, Tensor4<T>> saved;
  if (wanted.count(0)) saved[0] = x;

  Tensor4<T> cur = x;
  int pos = 0;
  for (const auto& layer : layers) {
    switch (layer.kind) {
      case LayerKind::Conv:
        cur = conv2d_forward(cur, layer.conv);
        break;
      case LayerKind::Relu:
        cur = relu(cur);
        break;
      case LayerKind::Upsample:
        cur = upsample_nearest(cur, layer.factor);
        break;
    }
    ++pos;
    auto [lo, hi] = by_dst.equal_range(pos);
    for (auto it = lo; it != hi; ++it) {
      const auto& src = saved.at(it->second);
      require_same_shape(src.shape, cur.shape, "memory connection");
      cur = add(src, cur);
    }
    if (wanted.count(pos)) saved[pos] = cur;
  }
  return cur;
}

template <typename T>
TapeForward<T> Model<T>::forward(Tape<T>& tape, const Tensor4<T>& x) {
  check_input(x.shape);
  TapeForward<T> result;
  std::multimap<int, int> by_dst;
  for (const auto& [src, dst] : skips) by_dst.emplace(dst, src);

  std::map<int, int> var_at_pos;
  int cur = tape.leaf(x);
  var_at_pos[0] = cur;
  int pos = 0;
  for (auto& layer : layers) {
    switch (layer.kind) {
      case LayerKind::Conv: {
        const int w = tape.leaf(layer.conv.weights);
        Tensor4<T> bias(1, layer.conv.out_channels(), 1, 1);
        for (int ch = 0; ch < layer.conv.out_channels(); ++ch)
          bias.at(0, ch, 0, 0) = layer.conv.bias[ch];
        const int b = tape.leaf(std::move(bias));
        result.param_vars.push_back(w);
        result.param_vars.push_back(b);
        cur = tape.conv2d(cur, w, b, layer.conv.stride, layer.conv.padding);
        break;
      }
      case LayerKind::Relu:
        cur = tape.relu(cur);
        break;
      case LayerKind::Upsample:
        cur = tape.upsample_nearest(cur, layer.factor);
        break;
    }
    ++pos;
    auto [lo, hi] = by_dst.equal_range(pos);
    for (auto it = lo; it != hi; ++it)
      cur = tape.add(var_at_pos.at(it->second), cur);
    var_at_pos[pos] = cur;
  }
  result.output = cur;
  return result;
}

template <typename T>
std::vector<ParamRef<T>> Model<T>::parameters() {
  std::vector<ParamRef<T>> refs;
  for (auto& layer : layers) {
    if (layer.kind != LayerKind::Conv) continue;
    const Shape& ws = layer.conv.weights.shape;
    refs.push_back({layer.name + ".weight",
                    {ws.n, ws.c, ws.h, ws.w},
                    layer.conv.weights.data.data(),
                    layer.conv.weights.size()});
    refs.push_back({layer.name + ".bias",
                    {static_cast<int>(layer.conv.bias.size())},
                    layer.conv.bias.data(),
                    layer.conv.bias.size()});
  }
  return refs;
}

template <typename T>
Tensor4<T> residual_block(const Tensor4<T>& h, const ConvParams<T>& conv1,
                          const ConvParams<T>& conv2, bool local_memory) {
  Tensor4<T> body = conv2d_forward(relu(conv2d_forward(h, conv1)), conv2);
  return local_memory ? add(h, body) : body;
}

template Tensor4<float> residual_block<float>(const Tensor4<float>&,
                                              const ConvParams<float>&,
                                              const ConvParams<float>&, bool);
template Tensor4<double> residual_block<double>(const Tensor4<double>&,
                                                const ConvParams<double>&,
                                                const ConvParams<double>&,
                                                bool);

namespace {

FlopReport flops_impl(const ModelConfig& config, int input_h, int input_w,
                      bool flat_equivalent) {
  if (input_h < 1 || input_w < 1)
    throw contract_error("estimate_flops: input size must be positive");
  if (!flat_equivalent && config.enable_hourglass &&
      (input_h % 4 != 0 || input_w % 4 != 0))
    throw contract_error(
        "estimate_flops: hourglass model requires dims divisible by 4");
  TopologyPlan plan = plan_topology(config);
  FlopReport report;
  int h = input_h, w = input_w;
  int index = 0;
  for (const auto& lp : plan.layers) {
    FlopLayer row;
    row.index = ++index;
    row.name = lp.name;
    if (lp.kind == LayerKind::Conv) {
      const int stride = flat_equivalent ? 1 : lp.stride;
      h = conv_out_dim(h, config.kernel, stride, lp.padding);
      w = conv_out_dim(w, config.kernel, stride, lp.padding);
      row.c = static_cast<std::uint64_t>(lp.in_ch);
      row.f = static_cast<std::uint64_t>(config.kernel);
      row.n = static_cast<std::uint64_t>(lp.out_ch);
      row.m = static_cast<std::uint64_t>(h) * w;
      row.term = row.c * row.f * row.f * row.n * row.m;
    } else if (lp.kind == LayerKind::Upsample && !flat_equivalent) {
      h *= lp.factor;
      w *= lp.factor;
    }
    report.total += row.term;
    report.layers.push_back(std::move(row));
  }
  return report;
}

}  // namespace

FlopReport estimate_flops(const ModelConfig& config, int input_h,
                          int input_w) {
  return flops_impl(config, input_h, input_w, false);
}

FlopReport estimate_flops_flat_equivalent(const ModelConfig& config,
                                          int input_h, int input_w) {
  return flops_impl(config, input_h, input_w, true);
}

template struct Model<float>;
template struct Model<double>;
template Model<float> build_model<float>(const ModelConfig&);
template Model<double> build_model<double>(const ModelConfig&);

}  // namespace dmcn

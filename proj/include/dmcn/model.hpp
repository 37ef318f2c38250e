#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dmcn/ops.hpp"
#include "dmcn/tape.hpp"
#include "dmcn/tensor.hpp"

namespace dmcn {

struct ModelConfig {
  int channels = 64;
  int kernel = 3;
  int blocks_per_stage = 4;  // 3 stages
  bool enable_local_memory = true;
  bool enable_global_memory = true;
  bool enable_hourglass = true;
  int input_channels = 1;
  unsigned seed = 0;

  bool operator==(const ModelConfig&) const = default;
};

enum class LayerKind { Conv, Relu, Upsample };

template <typename T>
struct Layer {
  LayerKind kind = LayerKind::Conv;
  std::string name;
  ConvParams<T> conv;  // Conv only
  int factor = 1;      // Upsample only
};

template <typename T>
struct ParamRef {
  std::string name;
  std::vector<int> dims;
  T* data = nullptr;
  std::size_t size = 0;
};

struct FlopLayer {
  int index = 0;  // layer index in the model
  std::string name;
  std::uint64_t c = 0, f = 0, n = 0, m = 0;
  std::uint64_t term = 0;  // c * f^2 * n * m; zero for non-conv layers
};

struct FlopReport {
  std::vector<FlopLayer> layers;
  std::uint64_t total = 0;
};

template <typename T>
struct TapeForward {
  int output = -1;
  // Aligned with Model::parameters(): weight and bias variable per conv.
  std::vector<int> param_vars;
};

// Instantiated DMCN topology.  Immutable for inference; training owns it
// exclusively while mutating parameters.
template <typename T>
struct Model {
  ModelConfig config;
  std::vector<Layer<T>> layers;
  // (src, dst) over activation positions: 0 is the network input, k is the
  // activation after layer k.  The value at src is added into the
  // activation at dst.
  std::vector<std::pair<int, int>> skips;

  Tensor4<T> forward(const Tensor4<T>& x) const;
  TapeForward<T> forward(Tape<T>& tape, const Tensor4<T>& x);
  std::vector<ParamRef<T>> parameters();

  void check_input(const Shape& s) const;
};

template <typename T>
Model<T> build_model(const ModelConfig& config);

// conv -> relu -> conv, plus the local memory connection around it when
// enabled.
template <typename T>
Tensor4<T> residual_block(const Tensor4<T>& h, const ConvParams<T>& conv1,
                          const ConvParams<T>& conv2, bool local_memory);

int count_layers(const ModelConfig& config);

// Per-layer Eq-style cost terms c*f^2*n*m at the given input size.
FlopReport estimate_flops(const ModelConfig& config, int input_h, int input_w);

// Cost of the same layer sequence with every convolution run at full
// resolution (strides forced to 1, resize markers dropped).
FlopReport estimate_flops_flat_equivalent(const ModelConfig& config,
                                          int input_h, int input_w);

using ModelF = Model<float>;
using ModelD = Model<double>;

}  // namespace dmcn

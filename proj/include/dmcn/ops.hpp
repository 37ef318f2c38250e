#pragma once

#include <vector>

#include "dmcn/tensor.hpp"

namespace dmcn {

// Filters (n_out, c_in, f, f) plus per-output-channel bias.
template <typename T>
struct ConvParams {
  Tensor4<T> weights;
  std::vector<T> bias;
  int stride = 1;
  int padding = 0;

  int out_channels() const { return weights.shape.n; }
  int in_channels() const { return weights.shape.c; }
  int kernel() const { return weights.shape.h; }
};

template <typename T>
struct ConvGrads {
  Tensor4<T> input;
  Tensor4<T> weights;
  std::vector<T> bias;
};

inline int conv_out_dim(int in, int kernel, int stride, int padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

// Cross-correlation with zero padding.
template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& input, const Tensor4<T>& weights,
                          const T* bias, int stride, int padding);

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& input, const ConvParams<T>& params) {
  return conv2d_forward(input, params.weights, params.bias.data(),
                        params.stride, params.padding);
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor4<T>& grad_out,
                             const Tensor4<T>& input,
                             const Tensor4<T>& weights, int stride,
                             int padding, bool need_grad_input = true);

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor4<T>& grad_out,
                             const Tensor4<T>& input,
                             const ConvParams<T>& params,
                             bool need_grad_input = true) {
  return conv2d_backward(grad_out, input, params.weights, params.stride,
                         params.padding, need_grad_input);
}

// Elementwise max(0, x).  The backward pass uses the convention that the
// subgradient at exactly 0 is 0.
template <typename T>
Tensor4<T> relu(const Tensor4<T>& input);

template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& grad_out, const Tensor4<T>& input);

template <typename T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b);

// Replicates each source pixel into a factor x factor block.
template <typename T>
Tensor4<T> upsample_nearest(const Tensor4<T>& input, int factor);

// Sums grad over each replicated block.
template <typename T>
Tensor4<T> upsample_nearest_backward(const Tensor4<T>& grad_out, int factor);

}  // namespace dmcn

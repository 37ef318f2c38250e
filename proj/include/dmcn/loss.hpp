#pragma once

#include <cmath>

#include "dmcn/tensor.hpp"

namespace dmcn {

// Mean absolute deviation over every element of the batch.
template <typename T>
T l1_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
  require_same_shape(pred.shape, target.shape, "l1_loss");
  double acc = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i)
    acc += std::abs(static_cast<double>(pred.data[i]) - target.data[i]);
  return static_cast<T>(acc / static_cast<double>(pred.data.size()));
}

// d loss / d pred = sign(pred - target) / element count, sign(0) = 0.
template <typename T>
Tensor4<T> l1_loss_grad(const Tensor4<T>& pred, const Tensor4<T>& target) {
  require_same_shape(pred.shape, target.shape, "l1_loss_grad");
  Tensor4<T> g(pred.shape);
  const T inv = T(1) / static_cast<T>(pred.data.size());
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const T d = pred.data[i] - target.data[i];
    g.data[i] = d > T(0) ? inv : (d < T(0) ? -inv : T(0));
  }
  return g;
}

}  // namespace dmcn

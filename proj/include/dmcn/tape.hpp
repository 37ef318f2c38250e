#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dmcn/loss.hpp"
#include "dmcn/ops.hpp"
#include "dmcn/tensor.hpp"

namespace dmcn {

// Define-by-run gradient tape.  Each recorded op captures the variable ids
// it touched; backward() replays the records in exact reverse execution
// order, accumulating gradients into every upstream variable.
//
// A tape is single-threaded by contract: one tape per training worker.
template <typename T>
class Tape {
 public:
  // Registers a leaf variable (input or parameter) and returns its id.
  int leaf(Tensor4<T> value) {
    slots_.push_back({std::move(value), {}});
    return static_cast<int>(slots_.size()) - 1;
  }

  const Tensor4<T>& value(int id) const { return slots_[id].value; }

  // Valid after backward(); zero-filled for variables the root does not
  // depend on.
  const Tensor4<T>& grad(int id) const { return slots_[id].grad; }

  std::size_t num_ops() const { return records_.size(); }

  int conv2d(int x, int w, int b, int stride, int padding) {
    const Tensor4<T>& bias = slots_[b].value;
    int out = leaf(conv2d_forward(slots_[x].value, slots_[w].value,
                                  bias.data.data(), stride, padding));
    records_.push_back([=](Tape& t) {
      ConvGrads<T> g = conv2d_backward(t.slots_[out].grad, t.slots_[x].value,
                                       t.slots_[w].value, stride, padding);
      t.accumulate(x, g.input);
      t.accumulate(w, g.weights);
      Tensor4<T>& bg = t.ensure_grad(b);
      for (int ch = 0; ch < bg.shape.c; ++ch) bg.at(0, ch, 0, 0) += g.bias[ch];
    });
    return out;
  }

  int relu(int x) {
    int out = leaf(dmcn::relu(slots_[x].value));
    records_.push_back([=](Tape& t) {
      t.accumulate(x, relu_backward(t.slots_[out].grad, t.slots_[x].value));
    });
    return out;
  }

  int add(int a, int b) {
    int out = leaf(dmcn::add(slots_[a].value, slots_[b].value));
    records_.push_back([=](Tape& t) {
      t.accumulate(a, t.slots_[out].grad);
      t.accumulate(b, t.slots_[out].grad);
    });
    return out;
  }

  int upsample_nearest(int x, int factor) {
    int out = leaf(dmcn::upsample_nearest(slots_[x].value, factor));
    records_.push_back([=](Tape& t) {
      t.accumulate(x, upsample_nearest_backward(t.slots_[out].grad, factor));
    });
    return out;
  }

  // Scalar-valued; target is a plain tensor, not a variable.
  int l1_loss(int pred, Tensor4<T> target) {
    Tensor4<T> loss(1, 1, 1, 1);
    loss.data[0] = dmcn::l1_loss(slots_[pred].value, target);
    int out = leaf(std::move(loss));
    records_.push_back([=, target = std::move(target)](Tape& t) {
      Tensor4<T> g = l1_loss_grad(t.slots_[pred].value, target);
      const T seed = t.slots_[out].grad.data[0];
      for (auto& v : g.data) v *= seed;
      t.accumulate(pred, g);
    });
    return out;
  }

  // Seeds the root with ones and runs all records in reverse.
  void backward(int root) {
    for (auto& s : slots_) s.grad = Tensor4<T>();
    Tensor4<T>& seed = ensure_grad(root);
    for (auto& v : seed.data) v = T(1);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)(*this);
    for (auto& s : slots_)
      if (s.grad.data.empty()) s.grad = Tensor4<T>(s.value.shape);
  }

 private:
  struct Slot {
    Tensor4<T> value;
    Tensor4<T> grad;
  };

  Tensor4<T>& ensure_grad(int id) {
    if (slots_[id].grad.data.empty())
      slots_[id].grad = Tensor4<T>(slots_[id].value.shape);
    return slots_[id].grad;
  }

  void accumulate(int id, const Tensor4<T>& g) {
    Tensor4<T>& dst = ensure_grad(id);
    for (std::size_t i = 0; i < g.data.size(); ++i) dst.data[i] += g.data[i];
  }

  std::vector<Slot> slots_;
  std::vector<std::function<void(Tape&)>> records_;
};

}  // namespace dmcn

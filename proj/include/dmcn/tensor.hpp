#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmcn {

// Thrown when an operation is called with arguments that violate its
// contract (shape mismatches, bad factors, undersized images, ...).
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown on malformed serialized data; carries the byte offset of the
// first unreadable field in the message.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Shape {
  int n = 0;  // batch
  int c = 0;  // channels
  int h = 0;  // rows
  int w = 0;  // cols

  bool operator==(const Shape&) const = default;

  std::size_t elems() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }

  std::string str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " +
           std::to_string(h) + ", " + std::to_string(w) + ")";
  }
};

// Dense rank-4 array in row-major (n, c, h, w) order.
template <typename T>
struct Tensor4 {
  Shape shape;
  std::vector<T> data;

  Tensor4() = default;
  explicit Tensor4(Shape s) : shape(s), data(s.elems(), T(0)) {}
  Tensor4(int n, int c, int h, int w) : Tensor4(Shape{n, c, h, w}) {}

  std::size_t size() const { return data.size(); }

  T& at(int n, int c, int y, int x) {
    return data[((static_cast<std::size_t>(n) * shape.c + c) * shape.h + y) *
                    shape.w +
                x];
  }
  const T& at(int n, int c, int y, int x) const {
    return data[((static_cast<std::size_t>(n) * shape.c + c) * shape.h + y) *
                    shape.w +
                x];
  }

  template <typename U>
  Tensor4<U> cast() const {
    Tensor4<U> out(shape);
    for (std::size_t i = 0; i < data.size(); ++i)
      out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

using TensorF = Tensor4<float>;
using TensorD = Tensor4<double>;

inline void require_same_shape(const Shape& a, const Shape& b,
                               const char* what) {
  if (!(a == b))
    throw contract_error(std::string(what) + ": shape mismatch " + a.str() +
                         " vs " + b.str());
}

}  // namespace dmcn

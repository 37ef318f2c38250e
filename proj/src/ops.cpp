#include "dmcn/ops.hpp"

#include <algorithm>
#include <cstring>

#ifdef DMCN_WITH_OPENBLAS
#include <cblas.h>
#endif

namespace dmcn {
namespace {

// C[m x n] (+)= A[m x k] * B[k x n], row major.  transA/transB select the
// logical operand orientation; lda/ldb are the leading dimensions of the
// stored matrices.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc) {
#ifdef DMCN_WITH_OPENBLAS
  if constexpr (std::is_same_v<T, float>) {
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, 1.0f, a, lda, b,
                ldb, beta, c, ldc);
    return;
  } else if constexpr (std::is_same_v<T, double>) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, 1.0, a, lda, b,
                ldb, beta, c, ldc);
    return;
  }
#endif
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T acc = 0;
      for (int p = 0; p < k; ++p) {
        T av = trans_a ? a[static_cast<std::size_t>(p) * lda + i]
                       : a[static_cast<std::size_t>(i) * lda + p];
        T bv = trans_b ? b[static_cast<std::size_t>(j) * ldb + p]
                       : b[static_cast<std::size_t>(p) * ldb + j];
        acc += av * bv;
      }
      T* dst = &c[static_cast<std::size_t>(i) * ldc + j];
      *dst = beta * *dst + acc;
    }
  }
}

// Unpacks one batch item into a [c*f*f, oh*ow] matrix; zero padding.
template <typename T>
void im2col(const Tensor4<T>& input, int item, int f, int stride, int padding,
            int oh, int ow, std::vector<T>& col) {
  const int c = input.shape.c, h = input.shape.h, w = input.shape.w;
  col.assign(static_cast<std::size_t>(c) * f * f * oh * ow, T(0));
  const std::size_t plane = static_cast<std::size_t>(oh) * ow;
  for (int ch = 0; ch < c; ++ch) {
    for (int ky = 0; ky < f; ++ky) {
      for (int kx = 0; kx < f; ++kx) {
        T* dst = col.data() + ((static_cast<std::size_t>(ch) * f + ky) * f + kx) * plane;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - padding;
          if (iy < 0 || iy >= h) continue;
          const T* src = &input.at(item, ch, iy, 0);
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - padding;
            if (ix < 0 || ix >= w) continue;
            dst[static_cast<std::size_t>(oy) * ow + ox] = src[ix];
          }
        }
      }
    }
  }
}

// Scatters a [c*f*f, oh*ow] matrix back into one batch item, accumulating
// overlapping taps.
template <typename T>
void col2im(const std::vector<T>& col, int f, int stride, int padding, int oh,
            int ow, Tensor4<T>& out, int item) {
  const int c = out.shape.c, h = out.shape.h, w = out.shape.w;
  const std::size_t plane = static_cast<std::size_t>(oh) * ow;
  for (int ch = 0; ch < c; ++ch) {
    for (int ky = 0; ky < f; ++ky) {
      for (int kx = 0; kx < f; ++kx) {
        const T* src = col.data() + ((static_cast<std::size_t>(ch) * f + ky) * f + kx) * plane;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - padding;
          if (iy < 0 || iy >= h) continue;
          T* dst = &out.at(item, ch, iy, 0);
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - padding;
            if (ix < 0 || ix >= w) continue;
            dst[ix] += src[static_cast<std::size_t>(oy) * ow + ox];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& input, const Tensor4<T>& weights,
                          const T* bias, int stride, int padding) {
  const int f = weights.shape.h;
  const int n_out = weights.shape.n;
  if (input.shape.c != weights.shape.c)
    throw contract_error("conv2d_forward: input channels " +
                         input.shape.str() + " do not match filter shape " +
                         weights.shape.str());
  if (stride < 1) throw contract_error("conv2d_forward: stride must be >= 1");
  if (padding < 0) throw contract_error("conv2d_forward: negative padding");
  if (input.shape.h + 2 * padding < f || input.shape.w + 2 * padding < f)
    throw contract_error("conv2d_forward: padded input " + input.shape.str() +
                         " smaller than kernel " + std::to_string(f));

  const int oh = conv_out_dim(input.shape.h, f, stride, padding);
  const int ow = conv_out_dim(input.shape.w, f, stride, padding);
  Tensor4<T> out(input.shape.n, n_out, oh, ow);

  const int k = input.shape.c * f * f;
  const int m = oh * ow;
  std::vector<T> col;
  for (int item = 0; item < input.shape.n; ++item) {
    im2col(input, item, f, stride, padding, oh, ow, col);
    gemm<T>(false, false, n_out, m, k, weights.data.data(), k, col.data(), m,
            T(0), &out.at(item, 0, 0, 0), m);
  }
  if (bias) {
    for (int item = 0; item < input.shape.n; ++item)
      for (int ch = 0; ch < n_out; ++ch) {
        T* dst = &out.at(item, ch, 0, 0);
        const T b = bias[ch];
        for (int i = 0; i < m; ++i) dst[i] += b;
      }
  }
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor4<T>& grad_out,
                             const Tensor4<T>& input,
                             const Tensor4<T>& weights, int stride,
                             int padding, bool need_grad_input) {
  const int f = weights.shape.h;
  const int n_out = weights.shape.n;
  const int oh = conv_out_dim(input.shape.h, f, stride, padding);
  const int ow = conv_out_dim(input.shape.w, f, stride, padding);
  Shape expect{input.shape.n, n_out, oh, ow};
  require_same_shape(grad_out.shape, expect, "conv2d_backward: grad_out");

  ConvGrads<T> g;
  g.weights = Tensor4<T>(weights.shape);
  g.bias.assign(n_out, T(0));
  if (need_grad_input) g.input = Tensor4<T>(input.shape);

  const int k = input.shape.c * f * f;
  const int m = oh * ow;
  std::vector<T> col, colgrad(static_cast<std::size_t>(k) * m);
  for (int item = 0; item < input.shape.n; ++item) {
    im2col(input, item, f, stride, padding, oh, ow, col);
    // dW[n_out x k] += dY[n_out x m] * col^T[m x k]
    gemm<T>(false, true, n_out, k, m, &grad_out.at(item, 0, 0, 0), m,
            col.data(), m, T(1), g.weights.data.data(), k);
    if (need_grad_input) {
      // dcol[k x m] = W^T[k x n_out] * dY[n_out x m]
      gemm<T>(true, false, k, m, n_out, weights.data.data(), k,
              &grad_out.at(item, 0, 0, 0), m, T(0), colgrad.data(), m);
      col2im(colgrad, f, stride, padding, oh, ow, g.input, item);
    }
    for (int ch = 0; ch < n_out; ++ch) {
      const T* src = &grad_out.at(item, ch, 0, 0);
      T acc = 0;
      for (int i = 0; i < m; ++i) acc += src[i];
      g.bias[ch] += acc;
    }
  }
  return g;
}

template <typename T>
Tensor4<T> relu(const Tensor4<T>& input) {
  Tensor4<T> out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i)
    out.data[i] = input.data[i] > T(0) ? input.data[i] : T(0);
  return out;
}

template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& grad_out, const Tensor4<T>& input) {
  require_same_shape(grad_out.shape, input.shape, "relu_backward");
  Tensor4<T> out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i)
    out.data[i] = input.data[i] > T(0) ? grad_out.data[i] : T(0);
  return out;
}

template <typename T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b) {
  require_same_shape(a.shape, b.shape, "add");
  Tensor4<T> out(a.shape);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = a.data[i] + b.data[i];
  return out;
}

template <typename T>
Tensor4<T> upsample_nearest(const Tensor4<T>& input, int factor) {
  if (factor < 1)
    throw contract_error("upsample_nearest: factor must be >= 1, got " +
                         std::to_string(factor));
  const Shape s = input.shape;
  Tensor4<T> out(s.n, s.c, s.h * factor, s.w * factor);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h * factor; ++y) {
        const T* src = &input.at(n, c, y / factor, 0);
        T* dst = &out.at(n, c, y, 0);
        for (int x = 0; x < s.w * factor; ++x) dst[x] = src[x / factor];
      }
  return out;
}

template <typename T>
Tensor4<T> upsample_nearest_backward(const Tensor4<T>& grad_out, int factor) {
  if (factor < 1)
    throw contract_error("upsample_nearest_backward: factor must be >= 1");
  const Shape s = grad_out.shape;
  if (s.h % factor != 0 || s.w % factor != 0)
    throw contract_error("upsample_nearest_backward: grad shape " + s.str() +
                         " not divisible by factor " + std::to_string(factor));
  Tensor4<T> out(s.n, s.c, s.h / factor, s.w / factor);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h; ++y) {
        const T* src = &grad_out.at(n, c, y, 0);
        T* dst = &out.at(n, c, y / factor, 0);
        for (int x = 0; x < s.w; ++x) dst[x / factor] += src[x];
      }
  return out;
}

#define DMCN_INSTANTIATE(T)                                                   \
  template Tensor4<T> conv2d_forward<T>(const Tensor4<T>&, const Tensor4<T>&, \
                                        const T*, int, int);                  \
  template ConvGrads<T> conv2d_backward<T>(                                   \
      const Tensor4<T>&, const Tensor4<T>&, const Tensor4<T>&, int, int,      \
      bool);                                                                  \
  template Tensor4<T> relu<T>(const Tensor4<T>&);                             \
  template Tensor4<T> relu_backward<T>(const Tensor4<T>&, const Tensor4<T>&); \
  template Tensor4<T> add<T>(const Tensor4<T>&, const Tensor4<T>&);           \
  template Tensor4<T> upsample_nearest<T>(const Tensor4<T>&, int);            \
  template Tensor4<T> upsample_nearest_backward<T>(const Tensor4<T>&, int);

DMCN_INSTANTIATE(float)
DMCN_INSTANTIATE(double)
#undef DMCN_INSTANTIATE

}  // namespace dmcn

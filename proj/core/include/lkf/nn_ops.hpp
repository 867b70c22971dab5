#pragma once

#include <optional>
#include <vector>

#include "lkf/tensor.hpp"

namespace lkf {

// Convolution filter bank. kernel is (c_out, c_in_per_group, k_h, k_w) with
// odd k_h/k_w; depthwise means groups == c_in == c_out. An empty bias vector
// means the layer has no bias term.
template <typename T>
struct ConvWeightsT {
  TensorT<T> kernel;
  std::vector<T> bias;
  int groups = 1;
};

using ConvWeights = ConvWeightsT<float>;

// Direct stride-1 convolution with zero same-padding ((k-1)/2 per side), so
// spatial dims are preserved for every odd kernel.
template <typename T>
TensorT<T> conv2d(const TensorT<T>& x, const ConvWeightsT<T>& w);

template <typename T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& kernel, const T* bias, int groups);

// 1xK depthwise followed by Kx1 depthwise, the decomposed form of a KxK
// depthwise kernel of rank 1.
template <typename T>
TensorT<T> strip_pair_conv(const TensorT<T>& x, const ConvWeightsT<T>& w_row,
                           const ConvWeightsT<T>& w_col);

// Output bin i covers rows [floor(i*h/out_h), ceil((i+1)*h/out_h)) with
// out_h = max(1, h/factor); columns analogous. First index wins ties, which
// makes the backward argmax routing deterministic.
template <typename T>
TensorT<T> adaptive_max_pool(const TensorT<T>& x, int factor,
                             std::vector<std::int64_t>* argmax = nullptr);

template <typename T>
TensorT<T> global_avg_pool(const TensorT<T>& x);

// Half-pixel centers: src = (dst + 0.5) * in/out - 0.5, clamped to the grid.
template <typename T>
TensorT<T> bilinear_upsample(const TensorT<T>& x, int out_h, int out_w);

// out(n, c, h*s+dy, w*s+dx) = in(n, c*s*s + dy*s + dx, h, w)
template <typename T>
TensorT<T> pixel_shuffle(const TensorT<T>& x, int s);

template <typename T>
TensorT<T> pixel_unshuffle(const TensorT<T>& x, int s);

template <typename T>
TensorT<T> sigmoid(const TensorT<T>& x);

// tanh approximation: 0.5x(1 + tanh(sqrt(2/pi)(x + 0.044715x^3)))
template <typename T>
TensorT<T> gelu(const TensorT<T>& x);

// ---- reverse-mode kernels ----------------------------------------------
// Each computes the adjoint of the forward op above for the given upstream
// gradient. Null output pointers skip that gradient.

template <typename T>
void conv2d_backward(const TensorT<T>& x, const TensorT<T>& kernel, int groups,
                     const TensorT<T>& gout, TensorT<T>* gx, TensorT<T>* gkernel,
                     std::vector<T>* gbias);

template <typename T>
TensorT<T> adaptive_max_pool_backward(const std::vector<std::int64_t>& argmax, Shape in_shape,
                                      const TensorT<T>& gout);

template <typename T>
TensorT<T> global_avg_pool_backward(Shape in_shape, const TensorT<T>& gout);

template <typename T>
TensorT<T> bilinear_upsample_backward(Shape in_shape, const TensorT<T>& gout);

template <typename T>
TensorT<T> sigmoid_backward(const TensorT<T>& y, const TensorT<T>& gout);

template <typename T>
TensorT<T> gelu_backward(const TensorT<T>& x, const TensorT<T>& gout);

}  // namespace lkf

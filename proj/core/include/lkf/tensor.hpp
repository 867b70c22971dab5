#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lkf/rng.hpp"

namespace lkf {

// (batch, channel, row, col). Element (n,c,h,w) lives at ((n*C + c)*H + h)*W + w.
struct Shape {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::int64_t numel() const {
    return static_cast<std::int64_t>(n) * c * h * w;
  }
  bool operator==(const Shape&) const = default;
  std::string to_string() const;
};

// Dense row-major 4-D tensor. Values are immutable once built by an op; ops
// take inputs by const reference and return fresh tensors. float is the
// working precision, double exists for gradient checking.
template <typename T>
class TensorT {
 public:
  TensorT() = default;

  explicit TensorT(Shape s) : shape_(validated(s)), data_(static_cast<std::size_t>(s.numel())) {}

  TensorT(Shape s, std::vector<T> data);

  static TensorT full(Shape s, T value) {
    TensorT t(s);
    for (T& v : t.data_) v = value;
    return t;
  }
  static TensorT zeros(Shape s) { return TensorT(s); }
  static TensorT ones(Shape s) { return full(s, T(1)); }

  const Shape& shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::int64_t numel() const { return shape_.numel(); }
  bool empty() const { return data_.empty(); }

  std::int64_t index(int n, int c, int h, int w) const {
    assert(n >= 0 && n < shape_.n && c >= 0 && c < shape_.c);
    assert(h >= 0 && h < shape_.h && w >= 0 && w < shape_.w);
    return ((static_cast<std::int64_t>(n) * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  T& at(int n, int c, int h, int w) { return data_[index(n, c, h, w)]; }
  T at(int n, int c, int h, int w) const { return data_[index(n, c, h, w)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out(shape_);
    auto dst = out.data();
    for (std::int64_t i = 0; i < numel(); ++i) dst[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  static Shape validated(Shape s);

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

// Elementwise/shape algebra. Shape mismatches raise lkf::Error naming both shapes.
template <typename T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b);

template <typename T>
TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b);

// b must match a, or have shape (n,c,1,1) to be broadcast over rows/cols.
template <typename T>
TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b);

template <typename T>
TensorT<T> concat_channels(std::span<const TensorT<T>> parts);

template <typename T>
std::pair<TensorT<T>, TensorT<T>> split_channels(const TensorT<T>& x, int at);

// Channels [c0, c1) of x.
template <typename T>
TensorT<T> slice_channels(const TensorT<T>& x, int c0, int c1);

template <typename T>
TensorT<T> random_uniform(Shape s, T lo, T hi, Rng& rng);

}  // namespace lkf

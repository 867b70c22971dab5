#include "lkf/tensor.hpp"

#include <cstring>

#include "lkf/error.hpp"

namespace lkf {

std::string Shape::to_string() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

namespace {

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (!(a == b)) {
    fail(Err::shape_mismatch,
         std::string(op) + ": shape mismatch " + a.to_string() + " vs " + b.to_string());
  }
}

}  // namespace

template <typename T>
Shape TensorT<T>::validated(Shape s) {
  if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    fail(Err::invalid_argument, "tensor dims must all be >= 1, got " + s.to_string());
  }
  return s;
}

template <typename T>
TensorT<T>::TensorT(Shape s, std::vector<T> data) : shape_(validated(s)), data_(std::move(data)) {
  if (static_cast<std::int64_t>(data_.size()) != shape_.numel()) {
    fail(Err::invalid_argument,
         "tensor data length " + std::to_string(data_.size()) + " does not match shape " +
             shape_.to_string());
  }
}

template <typename T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  TensorT<T> out(a.shape());
  auto pa = a.data(), pb = b.data();
  auto po = out.data();
  for (std::int64_t i = 0; i < a.numel(); ++i) po[i] = pa[i] + pb[i];
  return out;
}

template <typename T>
TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b) {
  require_same_shape(a.shape(), b.shape(), "sub");
  TensorT<T> out(a.shape());
  auto pa = a.data(), pb = b.data();
  auto po = out.data();
  for (std::int64_t i = 0; i < a.numel(); ++i) po[i] = pa[i] - pb[i];
  return out;
}

template <typename T>
TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa == sb) {
    TensorT<T> out(sa);
    auto pa = a.data(), pb = b.data();
    auto po = out.data();
    for (std::int64_t i = 0; i < a.numel(); ++i) po[i] = pa[i] * pb[i];
    return out;
  }
  if (sb.n == sa.n && sb.c == sa.c && sb.h == 1 && sb.w == 1) {
    TensorT<T> out(sa);
    const std::int64_t plane = static_cast<std::int64_t>(sa.h) * sa.w;
    auto pa = a.data(), pb = b.data();
    auto po = out.data();
    for (int n = 0; n < sa.n; ++n) {
      for (int c = 0; c < sa.c; ++c) {
        const T g = pb[static_cast<std::int64_t>(n) * sa.c + c];
        const std::int64_t base = (static_cast<std::int64_t>(n) * sa.c + c) * plane;
        for (std::int64_t i = 0; i < plane; ++i) po[base + i] = pa[base + i] * g;
      }
    }
    return out;
  }
  fail(Err::shape_mismatch,
       "mul: incompatible shapes " + sa.to_string() + " vs " + sb.to_string() +
           " (need equal shapes or (n,c,1,1) gate)");
}

template <typename T>
TensorT<T> concat_channels(std::span<const TensorT<T>> parts) {
  if (parts.empty()) fail(Err::invalid_argument, "concat_channels: empty part list");
  const Shape& s0 = parts[0].shape();
  int c_total = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.n != s0.n || s.h != s0.h || s.w != s0.w) {
      fail(Err::shape_mismatch,
           "concat_channels: part shape " + s.to_string() + " incompatible with " + s0.to_string());
    }
    c_total += s.c;
  }
  TensorT<T> out({s0.n, c_total, s0.h, s0.w});
  const std::int64_t plane = static_cast<std::int64_t>(s0.h) * s0.w;
  auto po = out.data();
  for (int n = 0; n < s0.n; ++n) {
    std::int64_t dst_c = 0;
    for (const auto& p : parts) {
      auto pp = p.data();
      const std::int64_t src_off = static_cast<std::int64_t>(n) * p.c() * plane;
      const std::int64_t dst_off = (static_cast<std::int64_t>(n) * c_total + dst_c) * plane;
      std::memcpy(po.data() + dst_off, pp.data() + src_off,
                  static_cast<std::size_t>(p.c() * plane) * sizeof(T));
      dst_c += p.c();
    }
  }
  return out;
}

template <typename T>
TensorT<T> slice_channels(const TensorT<T>& x, int c0, int c1) {
  if (c0 < 0 || c1 > x.c() || c0 >= c1) {
    fail(Err::invalid_argument, "slice_channels: bad range [" + std::to_string(c0) + "," +
                                    std::to_string(c1) + ") for " + x.shape().to_string());
  }
  TensorT<T> out({x.n(), c1 - c0, x.h(), x.w()});
  const std::int64_t plane = static_cast<std::int64_t>(x.h()) * x.w();
  auto px = x.data();
  auto po = out.data();
  for (int n = 0; n < x.n(); ++n) {
    const std::int64_t src = (static_cast<std::int64_t>(n) * x.c() + c0) * plane;
    const std::int64_t dst = static_cast<std::int64_t>(n) * (c1 - c0) * plane;
    std::memcpy(po.data() + dst, px.data() + src,
                static_cast<std::size_t>((c1 - c0) * plane) * sizeof(T));
  }
  return out;
}

template <typename T>
std::pair<TensorT<T>, TensorT<T>> split_channels(const TensorT<T>& x, int at) {
  if (at <= 0 || at >= x.c()) {
    fail(Err::invalid_argument, "split_channels: split index " + std::to_string(at) +
                                    " out of range for " + x.shape().to_string());
  }
  return {slice_channels(x, 0, at), slice_channels(x, at, x.c())};
}

template <typename T>
TensorT<T> random_uniform(Shape s, T lo, T hi, Rng& rng) {
  TensorT<T> out(s);
  for (T& v : out.data()) v = static_cast<T>(rng.next_range(lo, hi));
  return out;
}

template class TensorT<float>;
template class TensorT<double>;

#define LKF_INSTANTIATE(T)                                                           \
  template TensorT<T> add(const TensorT<T>&, const TensorT<T>&);                     \
  template TensorT<T> sub(const TensorT<T>&, const TensorT<T>&);                     \
  template TensorT<T> mul(const TensorT<T>&, const TensorT<T>&);                     \
  template TensorT<T> concat_channels(std::span<const TensorT<T>>);                  \
  template TensorT<T> slice_channels(const TensorT<T>&, int, int);                   \
  template std::pair<TensorT<T>, TensorT<T>> split_channels(const TensorT<T>&, int); \
  template TensorT<T> random_uniform(Shape, T, T, Rng&);

LKF_INSTANTIATE(float)
LKF_INSTANTIATE(double)
#undef LKF_INSTANTIATE

}  // namespace lkf

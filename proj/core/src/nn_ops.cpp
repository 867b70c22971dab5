#include "lkf/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lkf/error.hpp"

namespace lkf {

namespace {

template <typename T>
void check_conv_args(const TensorT<T>& x, const TensorT<T>& kernel, int groups) {
  const Shape& ks = kernel.shape();
  if (groups < 1) fail(Err::invalid_argument, "conv2d: groups must be >= 1");
  if (ks.h % 2 == 0 || ks.w % 2 == 0) {
    fail(Err::invalid_argument, "conv2d: kernel dims must be odd, got " + ks.to_string());
  }
  if (ks.n % groups != 0) {
    fail(Err::invalid_argument, "conv2d: c_out " + std::to_string(ks.n) +
                                    " not divisible by groups " + std::to_string(groups));
  }
  if (x.c() != ks.c * groups) {
    fail(Err::shape_mismatch, "conv2d: input channels " + std::to_string(x.c()) +
                                  " != c_in_per_group*groups = " +
                                  std::to_string(ks.c * groups));
  }
}

}  // namespace

template <typename T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& kernel, const T* bias, int groups) {
  check_conv_args(x, kernel, groups);
  const int co = kernel.n(), cipg = kernel.c(), kh = kernel.h(), kw = kernel.w();
  const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  const int N = x.n(), H = x.h(), W = x.w();
  const int co_pg = co / groups;
  TensorT<T> out({N, co, H, W});
  auto po = out.data();
  auto px = x.data();
  auto pk = kernel.data();
  const std::int64_t plane = static_cast<std::int64_t>(H) * W;

  for (int n = 0; n < N; ++n) {
    for (int oc = 0; oc < co; ++oc) {
      T* op = po.data() + (static_cast<std::int64_t>(n) * co + oc) * plane;
      const T bv = bias ? bias[oc] : T(0);
      std::fill_n(op, plane, bv);
      const int g = oc / co_pg;
      for (int ic = 0; ic < cipg; ++ic) {
        const T* ip = px.data() + (static_cast<std::int64_t>(n) * x.c() + g * cipg + ic) * plane;
        const T* kp = pk.data() + ((static_cast<std::int64_t>(oc) * cipg + ic) * kh) * kw;
        for (int ky = 0; ky < kh; ++ky) {
          const int dy = ky - ph;
          const int oy0 = std::max(0, -dy), oy1 = std::min(H, H - dy);
          for (int kx = 0; kx < kw; ++kx) {
            const T wv = kp[ky * kw + kx];
            const int dx = kx - pw;
            const int ox0 = std::max(0, -dx), ox1 = std::min(W, W - dx);
            for (int oy = oy0; oy < oy1; ++oy) {
              T* orow = op + static_cast<std::int64_t>(oy) * W;
              const T* irow = ip + static_cast<std::int64_t>(oy + dy) * W + dx;
              for (int ox = ox0; ox < ox1; ++ox) orow[ox] += wv * irow[ox];
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
TensorT<T> conv2d(const TensorT<T>& x, const ConvWeightsT<T>& w) {
  if (!w.bias.empty() && static_cast<int>(w.bias.size()) != w.kernel.n()) {
    fail(Err::invalid_argument, "conv2d: bias length " + std::to_string(w.bias.size()) +
                                    " != c_out " + std::to_string(w.kernel.n()));
  }
  return conv2d(x, w.kernel, w.bias.empty() ? nullptr : w.bias.data(), w.groups);
}

template <typename T>
TensorT<T> strip_pair_conv(const TensorT<T>& x, const ConvWeightsT<T>& w_row,
                           const ConvWeightsT<T>& w_col) {
  if (w_row.kernel.h() != 1 || w_col.kernel.w() != 1) {
    fail(Err::invalid_argument, "strip_pair_conv: expected 1xK then Kx1 kernels, got " +
                                    w_row.kernel.shape().to_string() + " and " +
                                    w_col.kernel.shape().to_string());
  }
  return conv2d(conv2d(x, w_row), w_col);
}

template <typename T>
void conv2d_backward(const TensorT<T>& x, const TensorT<T>& kernel, int groups,
                     const TensorT<T>& gout, TensorT<T>* gx, TensorT<T>* gkernel,
                     std::vector<T>* gbias) {
  check_conv_args(x, kernel, groups);
  const int co = kernel.n(), cipg = kernel.c(), kh = kernel.h(), kw = kernel.w();
  const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  const int N = x.n(), H = x.h(), W = x.w();
  const int co_pg = co / groups;
  const std::int64_t plane = static_cast<std::int64_t>(H) * W;
  if (gout.shape() != Shape{N, co, H, W}) {
    fail(Err::shape_mismatch, "conv2d_backward: upstream gradient shape " +
                                  gout.shape().to_string() + " does not match output");
  }
  if (gx) *gx = TensorT<T>::zeros(x.shape());
  if (gkernel) *gkernel = TensorT<T>::zeros(kernel.shape());
  if (gbias) gbias->assign(co, T(0));

  auto px = x.data();
  auto pk = kernel.data();
  auto pg = gout.data();

  for (int n = 0; n < N; ++n) {
    for (int oc = 0; oc < co; ++oc) {
      const T* gp = pg.data() + (static_cast<std::int64_t>(n) * co + oc) * plane;
      const int g = oc / co_pg;
      if (gbias) {
        T s = T(0);
        for (std::int64_t i = 0; i < plane; ++i) s += gp[i];
        (*gbias)[oc] += s;
      }
      for (int ic = 0; ic < cipg; ++ic) {
        const std::int64_t ch = static_cast<std::int64_t>(n) * x.c() + g * cipg + ic;
        const T* ip = px.data() + ch * plane;
        T* gxp = gx ? gx->data().data() + ch * plane : nullptr;
        const std::int64_t kbase = (static_cast<std::int64_t>(oc) * cipg + ic) * kh * kw;
        for (int ky = 0; ky < kh; ++ky) {
          const int dy = ky - ph;
          const int oy0 = std::max(0, -dy), oy1 = std::min(H, H - dy);
          for (int kx = 0; kx < kw; ++kx) {
            const int dx = kx - pw;
            const int ox0 = std::max(0, -dx), ox1 = std::min(W, W - dx);
            const T wv = pk[kbase + ky * kw + kx];
            T wsum = T(0);
            for (int oy = oy0; oy < oy1; ++oy) {
              const T* grow = gp + static_cast<std::int64_t>(oy) * W;
              const T* irow = ip + static_cast<std::int64_t>(oy + dy) * W + dx;
              if (gxp) {
                T* gxrow = gxp + static_cast<std::int64_t>(oy + dy) * W + dx;
                for (int ox = ox0; ox < ox1; ++ox) gxrow[ox] += wv * grow[ox];
              }
              if (gkernel) {
                for (int ox = ox0; ox < ox1; ++ox) wsum += irow[ox] * grow[ox];
              }
            }
            if (gkernel) gkernel->data()[kbase + ky * kw + kx] += wsum;
          }
        }
      }
    }
  }
}

template <typename T>
TensorT<T> adaptive_max_pool(const TensorT<T>& x, int factor,
                             std::vector<std::int64_t>* argmax) {
  if (factor < 1) fail(Err::invalid_argument, "adaptive_max_pool: factor must be >= 1");
  const int H = x.h(), W = x.w();
  const int oh = std::max(1, H / factor), ow = std::max(1, W / factor);
  TensorT<T> out({x.n(), x.c(), oh, ow});
  if (argmax) argmax->assign(static_cast<std::size_t>(out.numel()), 0);
  std::int64_t oi = 0;
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      for (int i = 0; i < oh; ++i) {
        const int r0 = static_cast<int>(static_cast<std::int64_t>(i) * H / oh);
        const int r1 = static_cast<int>((static_cast<std::int64_t>(i + 1) * H + oh - 1) / oh);
        for (int j = 0; j < ow; ++j) {
          const int c0 = static_cast<int>(static_cast<std::int64_t>(j) * W / ow);
          const int c1 = static_cast<int>((static_cast<std::int64_t>(j + 1) * W + ow - 1) / ow);
          T best = x.at(n, c, r0, c0);
          std::int64_t best_idx = x.index(n, c, r0, c0);
          for (int r = r0; r < r1; ++r) {
            for (int q = c0; q < c1; ++q) {
              const T v = x.at(n, c, r, q);
              if (v > best) {
                best = v;
                best_idx = x.index(n, c, r, q);
              }
            }
          }
          out.at(n, c, i, j) = best;
          if (argmax) (*argmax)[oi] = best_idx;
          ++oi;
        }
      }
    }
  }
  return out;
}

template <typename T>
TensorT<T> adaptive_max_pool_backward(const std::vector<std::int64_t>& argmax, Shape in_shape,
                                      const TensorT<T>& gout) {
  if (static_cast<std::int64_t>(argmax.size()) != gout.numel()) {
    fail(Err::invalid_argument, "adaptive_max_pool_backward: argmax/gradient size mismatch");
  }
  TensorT<T> gx = TensorT<T>::zeros(in_shape);
  auto pg = gout.data();
  auto pgx = gx.data();
  for (std::int64_t i = 0; i < gout.numel(); ++i) pgx[argmax[i]] += pg[i];
  return gx;
}

template <typename T>
TensorT<T> global_avg_pool(const TensorT<T>& x) {
  TensorT<T> out({x.n(), x.c(), 1, 1});
  const std::int64_t plane = static_cast<std::int64_t>(x.h()) * x.w();
  auto px = x.data();
  auto po = out.data();
  for (std::int64_t ch = 0; ch < static_cast<std::int64_t>(x.n()) * x.c(); ++ch) {
    T s = T(0);
    const T* p = px.data() + ch * plane;
    for (std::int64_t i = 0; i < plane; ++i) s += p[i];
    po[ch] = s / static_cast<T>(plane);
  }
  return out;
}

template <typename T>
TensorT<T> global_avg_pool_backward(Shape in_shape, const TensorT<T>& gout) {
  TensorT<T> gx(in_shape);
  const std::int64_t plane = static_cast<std::int64_t>(in_shape.h) * in_shape.w;
  auto pg = gout.data();
  auto pgx = gx.data();
  for (std::int64_t ch = 0; ch < static_cast<std::int64_t>(in_shape.n) * in_shape.c; ++ch) {
    const T v = pg[ch] / static_cast<T>(plane);
    T* p = pgx.data() + ch * plane;
    for (std::int64_t i = 0; i < plane; ++i) p[i] = v;
  }
  return gx;
}

namespace {

struct LerpCoord {
  int i0, i1;
  double f;  // weight of i1
};

inline LerpCoord lerp_coord(int dst, int in_size, int out_size) {
  double src = (dst + 0.5) * (static_cast<double>(in_size) / out_size) - 0.5;
  src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
  const int i0 = static_cast<int>(src);
  const int i1 = std::min(i0 + 1, in_size - 1);
  return {i0, i1, src - i0};
}

}  // namespace

template <typename T>
TensorT<T> bilinear_upsample(const TensorT<T>& x, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) fail(Err::invalid_argument, "bilinear_upsample: bad output size");
  TensorT<T> out({x.n(), x.c(), out_h, out_w});
  std::vector<LerpCoord> ys(out_h), xs(out_w);
  for (int i = 0; i < out_h; ++i) ys[i] = lerp_coord(i, x.h(), out_h);
  for (int j = 0; j < out_w; ++j) xs[j] = lerp_coord(j, x.w(), out_w);
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      for (int i = 0; i < out_h; ++i) {
        const auto& yc = ys[i];
        for (int j = 0; j < out_w; ++j) {
          const auto& xc = xs[j];
          const double v00 = x.at(n, c, yc.i0, xc.i0);
          const double v01 = x.at(n, c, yc.i0, xc.i1);
          const double v10 = x.at(n, c, yc.i1, xc.i0);
          const double v11 = x.at(n, c, yc.i1, xc.i1);
          const double top = v00 + (v01 - v00) * xc.f;
          const double bot = v10 + (v11 - v10) * xc.f;
          out.at(n, c, i, j) = static_cast<T>(top + (bot - top) * yc.f);
        }
      }
    }
  }
  return out;
}

template <typename T>
TensorT<T> bilinear_upsample_backward(Shape in_shape, const TensorT<T>& gout) {
  TensorT<T> gx = TensorT<T>::zeros(in_shape);
  const int out_h = gout.h(), out_w = gout.w();
  std::vector<LerpCoord> ys(out_h), xs(out_w);
  for (int i = 0; i < out_h; ++i) ys[i] = lerp_coord(i, in_shape.h, out_h);
  for (int j = 0; j < out_w; ++j) xs[j] = lerp_coord(j, in_shape.w, out_w);
  for (int n = 0; n < in_shape.n; ++n) {
    for (int c = 0; c < in_shape.c; ++c) {
      for (int i = 0; i < out_h; ++i) {
        const auto& yc = ys[i];
        for (int j = 0; j < out_w; ++j) {
          const auto& xc = xs[j];
          const T g = gout.at(n, c, i, j);
          gx.at(n, c, yc.i0, xc.i0) += static_cast<T>((1 - yc.f) * (1 - xc.f)) * g;
          gx.at(n, c, yc.i0, xc.i1) += static_cast<T>((1 - yc.f) * xc.f) * g;
          gx.at(n, c, yc.i1, xc.i0) += static_cast<T>(yc.f * (1 - xc.f)) * g;
          gx.at(n, c, yc.i1, xc.i1) += static_cast<T>(yc.f * xc.f) * g;
        }
      }
    }
  }
  return gx;
}

template <typename T>
TensorT<T> pixel_shuffle(const TensorT<T>& x, int s) {
  if (s < 1) fail(Err::invalid_argument, "pixel_shuffle: scale must be >= 1");
  if (x.c() % (s * s) != 0) {
    fail(Err::invalid_argument, "pixel_shuffle: channels " + std::to_string(x.c()) +
                                    " not divisible by s^2 = " + std::to_string(s * s));
  }
  const int oc = x.c() / (s * s);
  TensorT<T> out({x.n(), oc, x.h() * s, x.w() * s});
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < oc; ++c) {
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) {
          const int ic = c * s * s + dy * s + dx;
          for (int h = 0; h < x.h(); ++h) {
            for (int w = 0; w < x.w(); ++w) {
              out.at(n, c, h * s + dy, w * s + dx) = x.at(n, ic, h, w);
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
TensorT<T> pixel_unshuffle(const TensorT<T>& x, int s) {
  if (s < 1) fail(Err::invalid_argument, "pixel_unshuffle: scale must be >= 1");
  if (x.h() % s != 0 || x.w() % s != 0) {
    fail(Err::invalid_argument, "pixel_unshuffle: spatial dims not divisible by scale");
  }
  const int oh = x.h() / s, ow = x.w() / s;
  TensorT<T> out({x.n(), x.c() * s * s, oh, ow});
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) {
          const int oc = c * s * s + dy * s + dx;
          for (int h = 0; h < oh; ++h) {
            for (int w = 0; w < ow; ++w) {
              out.at(n, oc, h, w) = x.at(n, c, h * s + dy, w * s + dx);
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
TensorT<T> sigmoid(const TensorT<T>& x) {
  TensorT<T> out(x.shape());
  auto px = x.data();
  auto po = out.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    const T v = px[i];
    if (v >= T(0)) {
      po[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      po[i] = e / (T(1) + e);
    }
  }
  return out;
}

template <typename T>
TensorT<T> sigmoid_backward(const TensorT<T>& y, const TensorT<T>& gout) {
  TensorT<T> gx(y.shape());
  auto py = y.data();
  auto pg = gout.data();
  auto po = gx.data();
  for (std::int64_t i = 0; i < y.numel(); ++i) po[i] = pg[i] * py[i] * (T(1) - py[i]);
  return gx;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

template <typename T>
TensorT<T> gelu(const TensorT<T>& x) {
  TensorT<T> out(x.shape());
  auto px = x.data();
  auto po = out.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    const double v = px[i];
    po[i] = static_cast<T>(0.5 * v * (1.0 + std::tanh(kGeluC * (v + kGeluA * v * v * v))));
  }
  return out;
}

template <typename T>
TensorT<T> gelu_backward(const TensorT<T>& x, const TensorT<T>& gout) {
  TensorT<T> gx(x.shape());
  auto px = x.data();
  auto pg = gout.data();
  auto po = gx.data();
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    const double v = px[i];
    const double u = kGeluC * (v + kGeluA * v * v * v);
    const double t = std::tanh(u);
    const double sech2 = 1.0 - t * t;
    const double du = kGeluC * (1.0 + 3.0 * kGeluA * v * v);
    po[i] = static_cast<T>(pg[i] * (0.5 * (1.0 + t) + 0.5 * v * sech2 * du));
  }
  return gx;
}

#define LKF_INSTANTIATE(T)                                                                        \
  template TensorT<T> conv2d(const TensorT<T>&, const ConvWeightsT<T>&);                          \
  template TensorT<T> conv2d(const TensorT<T>&, const TensorT<T>&, const T*, int);                \
  template TensorT<T> strip_pair_conv(const TensorT<T>&, const ConvWeightsT<T>&,                  \
                                      const ConvWeightsT<T>&);                                    \
  template void conv2d_backward(const TensorT<T>&, const TensorT<T>&, int, const TensorT<T>&,    \
                                TensorT<T>*, TensorT<T>*, std::vector<T>*);                       \
  template TensorT<T> adaptive_max_pool(const TensorT<T>&, int, std::vector<std::int64_t>*);      \
  template TensorT<T> adaptive_max_pool_backward(const std::vector<std::int64_t>&, Shape,         \
                                                 const TensorT<T>&);                              \
  template TensorT<T> global_avg_pool(const TensorT<T>&);                                         \
  template TensorT<T> global_avg_pool_backward(Shape, const TensorT<T>&);                         \
  template TensorT<T> bilinear_upsample(const TensorT<T>&, int, int);                             \
  template TensorT<T> bilinear_upsample_backward(Shape, const TensorT<T>&);                       \
  template TensorT<T> pixel_shuffle(const TensorT<T>&, int);                                      \
  template TensorT<T> pixel_unshuffle(const TensorT<T>&, int);                                    \
  template TensorT<T> sigmoid(const TensorT<T>&);                                                 \
  template TensorT<T> sigmoid_backward(const TensorT<T>&, const TensorT<T>&);                     \
  template TensorT<T> gelu(const TensorT<T>&);                                                    \
  template TensorT<T> gelu_backward(const TensorT<T>&, const TensorT<T>&);

LKF_INSTANTIATE(float)
LKF_INSTANTIATE(double)
#undef LKF_INSTANTIATE

}  // namespace lkf

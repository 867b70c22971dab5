#include "lkf/fft.hpp"

#include <cmath>
#include <cstdint>

#include "lkf/error.hpp"

namespace lkf::fft {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cd wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cd u = a[i + j];
        const cd v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Chirp-z reduction of an arbitrary-N DFT to three power-of-two FFTs.
void bluestein(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  // chirp[k] = exp(-+ i pi k^2 / n); k^2 is reduced mod 2n to keep angles small
  std::vector<cd> chirp(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cd(std::cos(ang), std::sin(ang));
  }

  std::vector<cd> y(m, cd(0.0, 0.0)), v(m, cd(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) y[k] = a[k] * chirp[k];
  v[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    v[k] = std::conj(chirp[k]);
    v[m - k] = std::conj(chirp[k]);
  }

  fft_pow2(y, false);
  fft_pow2(v, false);
  for (std::size_t i = 0; i < m; ++i) y[i] *= v[i];
  fft_pow2(y, true);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = y[k] * inv_m * chirp[k];
}

}  // namespace

void transform(std::vector<cd>& a, bool inverse) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size())) {
    fft_pow2(a, inverse);
  } else {
    bluestein(a, inverse);
  }
}

void transform_2d(std::vector<cd>& grid, int h, int w, bool inverse) {
  if (h < 1 || w < 1 || grid.size() != static_cast<std::size_t>(h) * w) {
    fail(Err::invalid_argument, "transform_2d: grid size does not match h*w");
  }
  std::vector<cd> buf;
  buf.resize(static_cast<std::size_t>(w));
  for (int r = 0; r < h; ++r) {
    buf.assign(grid.begin() + static_cast<std::ptrdiff_t>(r) * w,
               grid.begin() + static_cast<std::ptrdiff_t>(r + 1) * w);
    transform(buf, inverse);
    std::copy(buf.begin(), buf.end(), grid.begin() + static_cast<std::ptrdiff_t>(r) * w);
  }
  buf.resize(static_cast<std::size_t>(h));
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) buf[r] = grid[static_cast<std::size_t>(r) * w + c];
    transform(buf, inverse);
    for (int r = 0; r < h; ++r) grid[static_cast<std::size_t>(r) * w + c] = buf[r];
  }
}

}  // namespace lkf::fft

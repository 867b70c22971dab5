#pragma once

#include <complex>
#include <vector>

namespace lkf::fft {

using cd = std::complex<double>;

// In-place unnormalized DFT of arbitrary length: radix-2 Cooley-Tukey for
// powers of two, Bluestein's chirp-z otherwise. inverse=true uses e^{+i...}
// and still does not divide by N.
void transform(std::vector<cd>& a, bool inverse);

// In-place unnormalized 2-D DFT of a row-major h x w grid (rows, then columns).
void transform_2d(std::vector<cd>& grid, int h, int w, bool inverse);

}  // namespace lkf::fft

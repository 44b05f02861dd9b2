#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace qcensus {

// In-place iterative radix-2 FFT; size must be a power of two. sign = -1 is the forward transform.
inline void fft(std::vector<std::complex<double>>& a, int sign)
{
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // one table of n/2 roots, each from its own sin/cos so errors do not accumulate
  std::vector<std::complex<double>> w(n / 2);
  const long double base = sign * 2.0L * 3.14159265358979323846264338327950288L / static_cast<long double>(n);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = static_cast<double>(base * static_cast<long double>(k));
    w[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2, stride = n / len;
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t k = 0; k < half; ++k) {
        const auto u = a[i + k], x = a[i + k + half], t = w[k * stride];
        // written out: operator* on std::complex goes through the NaN-checking library call
        const std::complex<double> v{x.real() * t.real() - x.imag() * t.imag(), x.real() * t.imag() + x.imag() * t.real()};
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
  }
}

inline std::size_t next_pow2(std::size_t n)
{
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// Linear convolution of real sequences.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.empty() || y.empty()) return {};
  const std::size_t L = x.size() + y.size() - 1;
  const std::size_t N = next_pow2(L);
  std::vector<std::complex<double>> a(N), b(N);
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) b[i] = y[i];
  fft(a, -1);
  fft(b, -1);
  for (std::size_t i = 0; i < N; ++i) a[i] *= b[i];
  fft(a, 1);
  std::vector<double> out(L);
  for (std::size_t i = 0; i < L; ++i) out[i] = a[i].real() / static_cast<double>(N);
  return out;
}

} // namespace qcensus

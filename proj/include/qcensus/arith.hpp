#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace qcensus {

using i64 = std::int64_t;
using i128 = __int128;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline i64 mod(i64 a, i64 m)
{
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mod(const BigInt& a, i64 m)
{
  BigInt r = a % m;
  if (r < 0) r += m;
  return static_cast<i64>(r);
}

inline i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>(static_cast<i128>(a) * b % m); }

inline i64 powmod(i64 a, std::uint64_t e, i64 m)
{
  i64 r = 1 % m;
  a = mod(a, m);
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// inverse of a modulo m; a must be coprime to m
inline i64 invmod(i64 a, i64 m)
{
  i64 g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1) {
    i64 q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw ArgumentError("invmod: argument not invertible");
  return mod(x, m);
}

inline i64 ipow(i64 b, int e)
{
  i64 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

inline BigInt bigpow(i64 b, int e)
{
  BigInt r = 1;
  BigInt bb = b;
  while (e-- > 0) r *= bb;
  return r;
}

inline Rational rpow(const Rational& b, int e)
{
  if (e < 0) return rpow(Rational(1) / b, -e);
  Rational r = 1, x = b;
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

inline bool is_prime(i64 n)
{
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<i64> primes_up_to(i64 n)
{
  std::vector<i64> out;
  if (n < 2) return out;
  std::vector<char> sieve(static_cast<std::size_t>(n + 1), 1);
  for (i64 i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= n; j += i) sieve[j] = 0;
  }
  return out;
}

// v_p(a); returns a large sentinel for a = 0
constexpr int kInfiniteValuation = 1 << 28;

inline int valuation(BigInt a, i64 p)
{
  if (a == 0) return kInfiniteValuation;
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

inline int valuation(i64 a, i64 p) { return valuation(BigInt(a), p); }

inline std::uint64_t isqrt(std::uint64_t n)
{
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_square(const BigInt& a)
{
  if (a < 0) return false;
  BigInt r = boost::multiprecision::sqrt(a);
  return r * r == a;
}

inline i64 legendre(i64 a, i64 p)
{
  a = mod(a, p);
  if (a == 0) return 0;
  return powmod(a, static_cast<std::uint64_t>((p - 1) / 2), p) == 1 ? 1 : -1;
}

inline int jacobi(i64 a, i64 n)
{
  a = mod(a, n);
  int t = 1;
  while (a) {
    while (a % 2 == 0) {
      a /= 2;
      i64 r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

// Kronecker symbol (D/m) for a discriminant D and m >= 1.
inline int kronecker(const BigInt& D, i64 m)
{
  i64 d4 = mod(D, 4);
  if (d4 != 0 && d4 != 1) throw ArgumentError("kronecker: D must be 0 or 1 mod 4");
  if (m < 1) throw ArgumentError("kronecker: m must be positive");
  int t = 1;
  while (m % 2 == 0) {
    m /= 2;
    i64 r = mod(D, 8);
    if (r % 2 == 0) return 0;
    if (r == 3 || r == 5) t = -t;
  }
  if (m == 1) return t;
  return t * jacobi(mod(D, m), m);
}

inline int kronecker(i64 D, i64 m) { return kronecker(BigInt(D), m); }

// Trial-division factorization; forms of interest have modest determinants.
inline std::vector<std::pair<i64, int>> factorize(BigInt a)
{
  if (a < 0) a = -a;
  if (a == 0) throw ArgumentError("factorize: zero");
  std::vector<std::pair<i64, int>> f;
  constexpr i64 kLimit = 10000000;
  for (i64 p = 2; p <= kLimit && BigInt(p) * p <= a; p += (p == 2 ? 1 : 2)) {
    if (a % p) continue;
    int e = 0;
    while (a % p == 0) {
      a /= p;
      ++e;
    }
    f.push_back({p, e});
  }
  if (a > 1) {
    if (a > BigInt(kLimit) * kLimit) throw UnsupportedError("factorize: cofactor too large for trial division");
    f.push_back({static_cast<i64>(a), 1});
  }
  return f;
}

inline std::vector<i64> prime_divisors(const BigInt& a)
{
  std::vector<i64> out;
  for (auto& [p, e] : factorize(a)) out.push_back(p);
  return out;
}

inline BigInt squarefree_part(const BigInt& d)
{
  BigInt r = d < 0 ? -1 : 1;
  for (auto& [p, e] : factorize(d))
    if (e % 2) r *= p;
  return r;
}

inline BigInt fundamental_discriminant(const BigInt& d)
{
  BigInt d0 = squarefree_part(d);
  return mod(d0, 4) == 1 ? d0 : BigInt(4 * d0);
}

inline std::vector<i64> positive_divisors(i64 m)
{
  m = m < 0 ? -m : m;
  std::vector<i64> lo, hi;
  for (i64 d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    lo.push_back(d);
    if (d != m / d) hi.push_back(m / d);
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

inline i64 content(const std::vector<i64>& v)
{
  i64 g = 0;
  for (i64 x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

} // namespace qcensus

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "form.hpp"
#include "local.hpp"

namespace qcensus {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Lanczos approximation (g = 7), with reflection for Re z < 1/2.
inline std::complex<double> cgamma(std::complex<double> z)
{
  static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * cgamma(1.0 - z));
  z -= 1.0;
  std::complex<double> x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
  std::complex<double> t = z + 7.5;
  return std::sqrt(2 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

inline double riemann_zeta(double s)
{
  if (s == 1.0) throw PoleError("zeta has a pole at s = 1");
  return static_cast<double>(boost::math::zeta(static_cast<long double>(s)));
}

// zeta'(s) by Richardson-extrapolated central differences
inline double riemann_zeta_derivative(double s)
{
  auto d = [&](long double h) {
    return (boost::math::zeta(static_cast<long double>(s) + h) - boost::math::zeta(static_cast<long double>(s) - h)) / (2 * h);
  };
  long double h = 1e-2L;
  long double t[4][4];
  for (int i = 0; i < 4; ++i) {
    t[i][0] = d(h / (1 << i));
    for (int j = 1; j <= i; ++j) t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / (std::pow(4.0L, j) - 1);
  }
  return static_cast<double>(t[3][3]);
}

// Hurwitz zeta for real s > 1 via Euler-Maclaurin.
inline long double hurwitz_zeta(long double s, long double a)
{
  static const long double b2k[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730, 7.0L / 6, -3617.0L / 510};
  const int N = 30;
  long double sum = 0;
  for (int k = 0; k < N; ++k) sum += std::pow(k + a, -s);
  long double x = N + a;
  sum += std::pow(x, 1 - s) / (s - 1) + 0.5L * std::pow(x, -s);
  long double fact = 1, rising = s, xp = std::pow(x, -s - 1);
  for (int j = 1; j <= 8; ++j) {
    fact *= (2 * j - 1) * (2 * j);
    sum += b2k[j - 1] / fact * rising * xp;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    xp /= x * x;
  }
  return sum;
}

// L(s, chi_D) for a fundamental discriminant D, real s >= 1.
inline double dirichlet_L(double s, const BigInt& D)
{
  if (D == 1) return riemann_zeta(s);
  const i64 q = static_cast<i64>(D < 0 ? BigInt(-D) : D);
  if (s == 1.0) {
    long double acc = 0;
    for (i64 a = 1; a < q; ++a) {
      int c = kronecker(D, a);
      if (c) acc += c * boost::math::digamma(static_cast<long double>(a) / q);
    }
    return static_cast<double>(-acc / q);
  }
  if (s < 1.0) throw UnsupportedError("dirichlet_L: only s >= 1 is implemented for nontrivial characters");
  long double acc = 0;
  for (i64 a = 1; a < q; ++a) {
    int c = kronecker(D, a);
    if (c) acc += c * hurwitz_zeta(s, static_cast<long double>(a) / q);
  }
  return static_cast<double>(std::pow(static_cast<long double>(q), -static_cast<long double>(s)) * acc);
}

// L with the Euler factors at the primes in S removed.
inline double partial_L(double s, const BigInt& D, const std::vector<i64>& S)
{
  double v = dirichlet_L(s, D);
  for (i64 p : S) v *= 1.0 - kronecker(D, p) * std::pow(static_cast<double>(p), -s);
  return v;
}

struct SeriesValue {
  double value = 0;
  double error = 0;
  bool regularized = false;  // zeta(s+1)-pole removed at every prime
  std::vector<std::pair<i64, Rational>> bad_factors;
};

struct SingularSeriesOptions {
  double tol = 1e-10;
  int kmax = 12;
};

// prod_p sigma_p at s = -1. When the good-prime product diverges (n = 4 with trivial
// character) the ζ(s+1) pole is removed at every prime and the result is flagged.
inline SeriesValue singular_series(const QuadForm& f, const SingularSeriesOptions& opt = {})
{
  const int n = f.n();
  const auto G = discriminant_character(f);
  const auto S = bad_primes(f);
  SeriesValue out;
  out.regularized = n == 4 && G.trivial;
  long double bad = 1;
  for (i64 p : S) {
    auto ctx = make_context(f, p, opt.kmax);
    auto lf = euler_factor(f, ctx, {});
    Rational sp = regularized_value(lf, -1);
    if (out.regularized) sp *= Rational(p - 1, p);
    out.bad_factors.push_back({p, sp});
    bad *= static_cast<long double>(static_cast<double>(sp));
  }
  double good;
  if (out.regularized) {
    good = 1.0 / partial_L(2.0, 1, S);
  } else {
    good = partial_L(n / 2.0 - 1, G.D0, S) / partial_L(n / 2.0, G.D0, S);
  }
  out.value = static_cast<double>(bad) * good;
  out.error = 1e-13 * std::abs(out.value);
  if (out.error > opt.tol * std::abs(out.value)) throw AnalyticError("singular series: requested tolerance not reachable");
  return out;
}

// Direct product over good primes up to P; tail bounded by sum_{p>P} 2p^{1-n/2}.
inline SeriesValue singular_series_product(const QuadForm& f, i64 P, int kmax = 12)
{
  const int n = f.n();
  const auto G = discriminant_character(f);
  const auto S = bad_primes(f);
  SeriesValue out;
  out.regularized = n == 4 && G.trivial;
  long double v = 1;
  for (i64 p : S) {
    auto lf = euler_factor(f, make_context(f, p, kmax), {});
    Rational sp = regularized_value(lf, -1);
    if (out.regularized) sp *= Rational(p - 1, p);
    v *= static_cast<long double>(static_cast<double>(sp));
  }
  for (i64 p : primes_up_to(P)) {
    if (std::find(S.begin(), S.end(), p) != S.end()) continue;
    long double e = G(p);
    long double pp = static_cast<long double>(p);
    long double sp = (1 - e * std::pow(pp, -n / 2.0L)) / (1 - e * std::pow(pp, 1 - n / 2.0L));
    if (out.regularized) sp *= 1 - 1 / pp;
    v *= sp;
  }
  out.value = static_cast<double>(v);
  // integral comparison for sum_{p>P} 2 p^{1-n/2} (regularized: 2 p^{-2})
  double expo = out.regularized ? 2.0 : n / 2.0 - 1;
  double tail = expo > 1 ? 2.0 * std::pow(static_cast<double>(P), 1 - expo) / (expo - 1) : INFINITY;
  out.error = std::abs(out.value) * std::expm1(tail);
  return out;
}

} // namespace qcensus

#pragma once

#include <cmath>
#include <cstdlib>
#include <utility>

#include "arch.hpp"

namespace qcensus {

constexpr double kDeltaMinX = 2.0;

struct DeltaExpansion {
  double X = 0;
  double h_scale = 1;  // multiplies h; the default has unit integral
  long long d_range = 0;
  double c = 1;

  double g(double x) const { return ArchSpec::g(x); }
  double h(double y) const { return h_scale * ArchSpec::h(y); }
};

// Smallest y0 with h(y) below 1e-13 for |y| >= y0.
inline double delta_cutoff()
{
  double y = 1;
  while (ArchSpec::h(y) > 1e-13) y += 0.01;
  return y;
}

inline DeltaExpansion make_delta(double X, double h_scale = 1, double range_factor = 1)
{
  if (!(X >= kDeltaMinX)) throw DomainError("delta expansion: X must be at least 2");
  if (!(h_scale > 0) || !(range_factor > 0)) throw ArgumentError("delta expansion: scales must be positive");
  DeltaExpansion e;
  e.X = X;
  e.h_scale = h_scale;
  e.d_range = static_cast<long long>(std::ceil(range_factor * X * delta_cutoff()));
  return e;
}

// Direct and swapped halves: sum g(m/(dX)) h(d/X) and sum g(d/X) h(m/(dX)), scaled by c/X.
inline std::pair<double, double> delta_terms(const DeltaExpansion& e, long long m)
{
  if (!(e.X >= kDeltaMinX)) throw DomainError("delta expansion: X must be at least 2");
  const double X = e.X;
  long double a = 0, b = 0;
  auto add = [&](long long d) {
    double q = static_cast<double>(m) / (static_cast<double>(d) * X);
    a += e.g(q) * e.h(d / X);
    b += e.g(d / X) * e.h(q);
  };
  if (m == 0) {
    for (long long d = 1; d <= e.d_range; ++d) {
      add(d);
      add(-d);
    }
  } else {
    const unsigned long long am = static_cast<unsigned long long>(std::llabs(m));
    for (unsigned long long d = 1; d * d <= am; ++d) {
      if (am % d) continue;
      unsigned long long d2 = am / d;
      for (long long s : {1LL, -1LL}) {
        add(s * static_cast<long long>(d));
        if (d2 != d) add(s * static_cast<long long>(d2));
      }
    }
  }
  return {static_cast<double>(e.c * a / X), static_cast<double>(e.c * b / X)};
}

inline double delta_eval(const DeltaExpansion& e, long long m)
{
  auto [a, b] = delta_terms(e, m);
  return a - b;
}

inline double calibrate_c(const DeltaExpansion& e)
{
  DeltaExpansion u = e;
  u.c = 1;
  return 1.0 / delta_eval(u, 0);
}

} // namespace qcensus

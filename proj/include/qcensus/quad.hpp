#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

namespace qcensus {

template <class T>
struct QuadResult {
  T value{};
  double error = 0;
  long evals = 0;
  int intervals = 0;
  bool converged = true;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

// 15-point Kronrod extension of the 7-point Gauss rule
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b)
{
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T resk = fc * kWgk[7];
  T resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    T f1 = f(c - h * kXgk[j]);
    T f2 = f(c + h * kXgk[j]);
    resk += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) resg += (f1 + f2) * kWg[j / 2];
  }
  return {a, b, resk * h, magnitude((resk - resg) * h)};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod on a finite interval.
template <class T, class F>
QuadResult<T> integrate(F&& f, double a, double b, const QuadOptions& opt = {})
{
  QuadResult<T> r;
  std::priority_queue<detail::Segment<T>> heap;
  auto first = detail::gk15<T>(f, a, b);
  r.evals = 15;
  heap.push(first);
  T total = first.value;
  double err = first.error;
  int n = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
    if (n >= opt.max_subdivisions) {
      r.converged = false;
      break;
    }
    auto s = heap.top();
    heap.pop();
    double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      heap.push(s);
      r.converged = false;
      break;
    }
    auto l = detail::gk15<T>(f, s.a, m);
    auto rr = detail::gk15<T>(f, m, s.b);
    r.evals += 30;
    total += l.value + rr.value - s.value;
    err += l.error + rr.error - s.error;
    heap.push(l);
    heap.push(rr);
    ++n;
  }
  // resum for a result independent of update order
  T sum{};
  double esum = 0;
  std::vector<detail::Segment<T>> segs;
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& s : segs) {
    sum += s.value;
    esum += s.error;
  }
  r.value = sum;
  r.error = esum;
  r.intervals = n;
  return r;
}

// Integral over [0, inf): [0,1] directly, [1,inf) through x -> 1/x.
template <class T, class F>
QuadResult<T> integrate_half_line(F&& f, const QuadOptions& opt = {})
{
  auto a = integrate<T>(f, 0.0, 1.0, opt);
  auto g = [&](double x) -> T {
    if (x <= 0) return T{};
    return f(1.0 / x) * (1.0 / (x * x));
  };
  auto b = integrate<T>(g, 0.0, 1.0, opt);
  QuadResult<T> r;
  r.value = a.value + b.value;
  r.error = a.error + b.error;
  r.evals = a.evals + b.evals;
  r.intervals = a.intervals + b.intervals;
  r.converged = a.converged && b.converged;
  return r;
}

} // namespace qcensus

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arch.hpp"
#include "fft.hpp"
#include "form.hpp"

namespace qcensus {

enum class EnumStrategy { automatic, generic_backtrack, split_divisor };

inline const char* strategy_name(EnumStrategy s)
{
  switch (s) {
  case EnumStrategy::automatic: return "auto";
  case EnumStrategy::generic_backtrack: return "generic_backtrack";
  case EnumStrategy::split_divisor: return "split_divisor";
  }
  return "?";
}

struct ZeroEnumeration {
  i64 radius = 0;
  EnumStrategy strategy = EnumStrategy::generic_backtrack;
  std::vector<IntVec> points;  // sorted lexicographically
};

namespace detail {

// Integer zeros of x^T S x in the box [-R, R]^n.
class ZeroFinder {
public:
  ZeroFinder(IntMat S, i64 R, long long budget) : S_(std::move(S)), n_(static_cast<int>(S_.size())), R_(R), budget_(budget) {}

  // (i, j) with x^T S x = 2 S_ij x_i x_j + (terms without x_i, x_j), or (-1, -1)
  std::pair<int, int> hyperbolic_pair() const
  {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        if (S_[i][i] != 0 || S_[j][j] != 0 || S_[i][j] == 0) continue;
        bool iso = true;
        for (int k = 0; k < n_ && iso; ++k)
          if (k != i && k != j) iso = S_[i][k] == 0 && S_[j][k] == 0;
        if (iso) return {i, j};
      }
    return {-1, -1};
  }

  std::vector<IntVec> backtrack()
  {
    out_.clear();
    nodes_ = 0;
    IntVec x(n_, 0);
    dfs(0, x);
    return finish();
  }

  std::vector<IntVec> split_divisor()
  {
    auto [a, b] = hyperbolic_pair();
    if (a < 0) throw UnsupportedError("split_divisor: form has no isolated hyperbolic block");
    out_.clear();
    nodes_ = 0;
    std::vector<int> rest;
    for (int k = 0; k < n_; ++k)
      if (k != a && k != b) rest.push_back(k);
    const i128 c = 2 * static_cast<i128>(S_[a][b]);
    IntVec x(n_, 0);
    std::vector<i64> y(rest.size(), -R_);
    while (true) {
      for (std::size_t t = 0; t < rest.size(); ++t) x[rest[t]] = y[t];
      i128 m = 0;
      for (std::size_t s = 0; s < rest.size(); ++s)
        for (std::size_t t = 0; t < rest.size(); ++t) m += static_cast<i128>(S_[rest[s]][rest[t]]) * y[s] * y[t];
      // c x_a x_b = -m
      if (m == 0) {
        for (i64 v = -R_; v <= R_; ++v) {
          x[a] = 0;
          x[b] = v;
          emit(x);
          if (v != 0) {
            x[a] = v;
            x[b] = 0;
            emit(x);
          }
        }
      } else if (m % c == 0) {
        i128 M = -m / c;
        i128 absM = M < 0 ? -M : M;
        for (i64 d = 1; d <= R_ && static_cast<i128>(d) * d <= absM; ++d) {
          if (absM % d) continue;
          i128 e = absM / d;
          for (int pass = 0; pass < 2; ++pass) {
            i64 u = pass == 0 ? d : static_cast<i64>(e);
            if (pass == 1 && e == d) break;
            if (e > R_ && pass == 0) continue;
            if (pass == 1 && e > R_) continue;
            i64 w = static_cast<i64>(M / u);
            for (int sg = -1; sg <= 1; sg += 2) {
              x[a] = sg * u;
              x[b] = sg * w;
              if (std::abs(x[b]) <= R_) emit(x);
            }
          }
        }
      }
      std::size_t t = 0;
      while (t < rest.size() && ++y[t] > R_) y[t++] = -R_;
      if (t == rest.size()) break;
    }
    x[a] = x[b] = 0;
    return finish();
  }

private:
  void emit(const IntVec& x)
  {
    if (++nodes_ > budget_) throw ResourceError("enumeration budget exceeded after " + std::to_string(out_.size()) + " points");
    out_.push_back(x);
  }

  std::vector<IntVec> finish()
  {
    std::sort(out_.begin(), out_.end());
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

  // interval of x^T S x over completions of the first k coordinates
  bool feasible(int k, const IntVec& x) const
  {
    i128 lo = 0, hi = 0;
    const i128 R = R_, R2 = R * R;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lo += static_cast<i128>(S_[i][j]) * x[i] * x[j];
    hi = lo;
    for (int j = k; j < n_; ++j) {
      i128 L = 0;
      for (int i = 0; i < k; ++i) L += 2 * static_cast<i128>(S_[i][j]) * x[i];
      i128 aL = L < 0 ? -L : L;
      lo -= aL * R;
      hi += aL * R;
      if (S_[j][j] > 0) hi += S_[j][j] * R2;
      if (S_[j][j] < 0) lo += S_[j][j] * R2;
      for (int l = j + 1; l < n_; ++l) {
        i128 c = 2 * static_cast<i128>(S_[j][l] < 0 ? -S_[j][l] : S_[j][l]);
        lo -= c * R2;
        hi += c * R2;
      }
    }
    return lo <= 0 && hi >= 0;
  }

  void dfs(int k, IntVec& x)
  {
    if (++nodes_ > budget_) throw ResourceError("enumeration budget exceeded after " + std::to_string(out_.size()) + " points");
    if (k == n_ - 1) {
      solve_last(x);
      return;
    }
    for (i64 v = -R_; v <= R_; ++v) {
      x[k] = v;
      if (feasible(k + 1, x)) dfs(k + 1, x);
    }
    x[k] = 0;
  }

  // S_ll y^2 + L y + C = 0 for the last coordinate
  void solve_last(IntVec& x)
  {
    const int l = n_ - 1;
    i128 C = 0, L = 0;
    for (int i = 0; i < l; ++i) {
      L += 2 * static_cast<i128>(S_[i][l]) * x[i];
      for (int j = 0; j < l; ++j) C += static_cast<i128>(S_[i][j]) * x[i] * x[j];
    }
    const i128 a = S_[l][l];
    auto try_root = [&](i128 y) {
      if (y < -R_ || y > R_) return;
      if ((a * y + L) * y + C != 0) return;
      x[l] = static_cast<i64>(y);
      out_.push_back(x);
    };
    if (a == 0) {
      if (L == 0) {
        if (C == 0)
          for (i64 y = -R_; y <= R_; ++y) try_root(y);
      } else if (C % L == 0) {
        try_root(-C / L);
      }
    } else {
      i128 disc = L * L - 4 * a * C;
      if (disc >= 0) {
        BigInt d = 0;
        {
          // disc fits in 128 bits; take the integer square root exactly
          BigInt big = static_cast<std::uint64_t>(static_cast<unsigned __int128>(disc) >> 64);
          big <<= 64;
          big += static_cast<std::uint64_t>(static_cast<unsigned __int128>(disc));
          d = boost::multiprecision::sqrt(big);
          if (d * d != big) d = -1;
        }
        if (d >= 0) {
          i128 r = static_cast<i128>(static_cast<long long>(d));
          for (int sg = -1; sg <= 1; sg += 2) {
            i128 num = -L + sg * r;
            if (num % (2 * a) == 0) try_root(num / (2 * a));
            if (r == 0) break;
          }
        }
      }
    }
    x[l] = 0;
  }

  IntMat S_;
  int n_;
  i64 R_;
  long long budget_;
  long long nodes_ = 0;
  std::vector<IntVec> out_;
};

inline ZeroEnumeration run_finder(IntMat S, bool definite, i64 R, EnumStrategy strategy, long long budget)
{
  if (R < 1) throw ArgumentError("enumerate: R must be at least 1");
  ZeroEnumeration z;
  z.radius = R;
  if (definite) {
    z.strategy = strategy == EnumStrategy::automatic ? EnumStrategy::generic_backtrack : strategy;
    z.points = {IntVec(S.size(), 0)};
    return z;
  }
  ZeroFinder fz(std::move(S), R, budget);
  if (strategy == EnumStrategy::automatic)
    strategy = fz.hyperbolic_pair().first >= 0 ? EnumStrategy::split_divisor : EnumStrategy::generic_backtrack;
  z.strategy = strategy;
  z.points = strategy == EnumStrategy::split_divisor ? fz.split_divisor() : fz.backtrack();
  return z;
}

} // namespace detail

inline ZeroEnumeration enumerate_zeros(const QuadForm& f, i64 R, EnumStrategy strategy = EnumStrategy::automatic,
                                       long long budget = 2000000000LL)
{
  return detail::run_finder(f.J(), f.definite(), R, strategy, budget);
}

inline ZeroEnumeration enumerate_dual_zeros(const QuadForm& f, i64 R, EnumStrategy strategy = EnumStrategy::automatic,
                                            long long budget = 2000000000LL)
{
  IntMat S(f.n(), IntVec(f.n()));
  for (int i = 0; i < f.n(); ++i)
    for (int j = 0; j < f.n(); ++j) S[i][j] = static_cast<i64>(f.adj()[i][j]);
  return detail::run_finder(S, f.definite(), R, strategy, budget);
}

enum class CountMethod { automatic, enumerate, block_convolution };

inline const char* method_name(CountMethod m)
{
  switch (m) {
  case CountMethod::automatic: return "auto";
  case CountMethod::enumerate: return "enumerate";
  case CountMethod::block_convolution: return "block_convolution";
  }
  return "?";
}

struct SmoothedCount {
  double X = 0;
  double value = 0;
  double truncation_error = 0;
  i64 radius = 0;
  CountMethod method = CountMethod::enumerate;
};

// Shell-sum bound on the Gaussian weight outside the box [-R, R]^n.
inline double gaussian_tail(int n, double lambda_min, double X, i64 R)
{
  double tail = 0;
  for (i64 k = R + 1;; ++k) {
    double shell = std::pow(2.0 * k + 1, n) - std::pow(2.0 * k - 1, n);
    double term = shell * std::exp(-kPi * lambda_min * static_cast<double>(k) * k / (X * X));
    tail += term;
    if (term < 1e-30 * std::max(1.0, tail) && k > 2 * R + 10) break;
    if (k > R + 100000) break;
  }
  return tail;
}

inline i64 choose_radius(int n, double lambda_min, double X, double tol = 1e-8)
{
  i64 R = std::max<i64>(1, static_cast<i64>(std::floor(X)));
  while (gaussian_tail(n, lambda_min, X, R) > tol) R = R + std::max<i64>(1, R / 16);
  // back off to the smallest admissible radius
  i64 lo = R / 2;
  while (lo + 1 < R) {
    i64 mid = (lo + R) / 2;
    if (gaussian_tail(n, lambda_min, X, mid) > tol)
      lo = mid;
    else
      R = mid;
  }
  return R;
}

namespace detail {

struct SparseHist {
  i64 lo = 0;               // value of index 0
  std::vector<double> w;    // dense over [lo, lo + size)
  std::size_t nnz = 0;
};

inline bool block_compatible(const Eigen::MatrixXd& A, const std::vector<std::vector<int>>& blocks)
{
  std::vector<int> comp(A.rows());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i : blocks[b]) comp[i] = static_cast<int>(b);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (comp[i] != comp[j] && A(i, j) != 0) return false;
  return true;
}

inline SparseHist block_histogram(const QuadForm& f, const Eigen::MatrixXd& A, const std::vector<int>& idx, double X, i64 R)
{
  const int d = static_cast<int>(idx.size());
  i64 qmax = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) qmax += std::abs(a == b ? f.J(idx[a], idx[a]) / 2 : f.J(idx[a], idx[b])) * R * R;
  SparseHist h;
  h.lo = -qmax;
  h.w.assign(static_cast<std::size_t>(2 * qmax + 1), 0.0);
  std::vector<i64> x(d, -R);
  const double s = kPi / (X * X);
  while (true) {
    i64 q = 0;
    double e = 0;
    for (int a = 0; a < d; ++a) {
      q += f.J(idx[a], idx[a]) / 2 * x[a] * x[a];
      e += A(idx[a], idx[a]) * x[a] * x[a];
      for (int b = a + 1; b < d; ++b) {
        q += f.J(idx[a], idx[b]) * x[a] * x[b];
        e += 2 * A(idx[a], idx[b]) * x[a] * x[b];
      }
    }
    h.w[static_cast<std::size_t>(q - h.lo)] += std::exp(-s * e);
    int t = d - 1;
    while (t >= 0 && ++x[t] > R) x[t--] = -R;
    if (t < 0) break;
  }
  // trim empty ends
  std::size_t first = 0, last = h.w.size();
  while (first < last && h.w[first] == 0) ++first;
  while (last > first && h.w[last - 1] == 0) --last;
  h.lo += static_cast<i64>(first);
  h.w = std::vector<double>(h.w.begin() + static_cast<long>(first), h.w.begin() + static_cast<long>(last));
  for (double v : h.w) h.nnz += v != 0;
  return h;
}

inline SparseHist combine(const SparseHist& a, const SparseHist& b)
{
  SparseHist c;
  c.lo = a.lo + b.lo;
  const double La = static_cast<double>(a.w.size()), Lb = static_cast<double>(b.w.size());
  const double direct = static_cast<double>(a.nnz) * static_cast<double>(b.nnz);
  const double viafft = 6 * (La + Lb) * std::log2(La + Lb + 2);
  if (direct <= viafft) {
    c.w.assign(a.w.size() + b.w.size() - 1, 0.0);
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < b.w.size(); ++j)
      if (b.w[j] != 0) nb.push_back(j);
    for (std::size_t i = 0; i < a.w.size(); ++i) {
      if (a.w[i] == 0) continue;
      for (std::size_t j : nb) c.w[i + j] += a.w[i] * b.w[j];
    }
  } else {
    c.w = convolve(a.w, b.w);
  }
  for (double v : c.w) c.nnz += v != 0;
  return c;
}

inline double dot_opposite(const SparseHist& a, const SparseHist& b)
{
  // sum_q a[q] b[-q]
  double s = 0;
  for (std::size_t i = 0; i < a.w.size(); ++i) {
    i64 q = a.lo + static_cast<i64>(i);
    i64 j = -q - b.lo;
    if (j >= 0 && j < static_cast<i64>(b.w.size())) s += a.w[i] * b.w[static_cast<std::size_t>(j)];
  }
  return s;
}

} // namespace detail

inline double lambda_min(const Eigen::MatrixXd& A)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.eigenvalues().minCoeff();
}

inline bool supports_block_convolution(const QuadForm& f, const ArchSpec& spec)
{
  auto blocks = f.blocks();
  if (blocks.size() < 2 || !detail::block_compatible(spec.A, blocks)) return false;
  for (const auto& b : blocks)
    if (b.size() > 3) return false;
  return true;
}

inline SmoothedCount smoothed_count(const QuadForm& f, const ArchSpec& spec, double X, CountMethod method = CountMethod::automatic,
                                    i64 radius = 0)
{
  spec.validate(f.n());
  if (!(X > 0)) throw ArgumentError("smoothed_count: X must be positive");
  SmoothedCount out;
  out.X = X;
  const double lmin = lambda_min(spec.A);
  out.radius = radius > 0 ? radius : choose_radius(f.n(), lmin, X);
  out.truncation_error = gaussian_tail(f.n(), lmin, X, out.radius);
  if (method == CountMethod::automatic)
    method = supports_block_convolution(f, spec) ? CountMethod::block_convolution : CountMethod::enumerate;
  out.method = method;
  const double s = kPi / (X * X);
  if (method == CountMethod::enumerate) {
    auto z = enumerate_zeros(f, out.radius);
    double sum = 0;
    for (const auto& p : z.points) {
      Eigen::VectorXd v(f.n());
      for (int i = 0; i < f.n(); ++i) v[i] = static_cast<double>(p[i]);
      sum += std::exp(-s * v.dot(spec.A * v));
    }
    out.value = sum;
    return out;
  }
  if (!supports_block_convolution(f, spec)) throw UnsupportedError("smoothed_count: A is not block-compatible with J");
  auto blocks = f.blocks();
  std::vector<detail::SparseHist> hs;
  std::map<std::string, std::size_t> seen;
  for (const auto& b : blocks) {
    // identical blocks share one histogram
    std::string key;
    for (int i : b)
      for (int j : b) key += std::to_string(f.J(i, j)) + ":" + std::to_string(spec.A(i, j)) + ";";
    auto it = seen.find(key);
    if (it != seen.end()) {
      hs.push_back(hs[it->second]);
      continue;
    }
    seen[key] = hs.size();
    hs.push_back(detail::block_histogram(f, spec.A, b, X, out.radius));
  }
  std::size_t half = hs.size() / 2;
  detail::SparseHist g1 = hs[0], g2 = hs[half];
  for (std::size_t i = 1; i < half; ++i) g1 = detail::combine(g1, hs[i]);
  for (std::size_t i = half + 1; i < hs.size(); ++i) g2 = detail::combine(g2, hs[i]);
  out.value = detail::dot_opposite(g1, g2);
  return out;
}

} // namespace qcensus

#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arith.hpp"

namespace qcensus {

using IntVec = std::vector<i64>;
using IntMat = std::vector<std::vector<i64>>;
using BigMat = std::vector<std::vector<BigInt>>;

namespace detail {

inline BigInt bareiss_det(BigMat a)
{
  const std::size_t n = a.size();
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// exact inverse over Q, scaled by det to give the adjugate
inline BigMat adjugate(const IntMat& J, const BigInt& det)
{
  const std::size_t n = J.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = J[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t r = c;
    while (a[r][c] == 0) ++r;
    std::swap(a[r], a[c]);
    Rational piv = a[c][c];
    for (auto& x : a[c]) x /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  BigMat adj(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = a[i][n + j] * det;
      if (denominator(v) != 1) throw NumericalError("adjugate is not integral");
      adj[i][j] = numerator(v);
    }
  return adj;
}

// Faddeev-LeVerrier; returns c_0..c_n of det(lambda I - J)
inline std::vector<BigInt> charpoly(const IntMat& J)
{
  const std::size_t n = J.size();
  std::vector<BigInt> c(n + 1);
  c[n] = 1;
  BigMat M(n, std::vector<BigInt>(n, 0));
  for (std::size_t k = 1; k <= n; ++k) {
    BigMat JM(n, std::vector<BigInt>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        BigInt s = 0;
        for (std::size_t l = 0; l < n; ++l) s += BigInt(J[i][l]) * M[l][j];
        JM[i][j] = s;
      }
    for (std::size_t i = 0; i < n; ++i) JM[i][i] += c[n - k + 1];
    M = JM;
    BigInt tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += BigInt(J[i][l]) * M[l][i];
    c[n - k] = -tr / static_cast<long long>(k);
  }
  return c;
}

inline int sign_changes(const std::vector<BigInt>& c)
{
  int changes = 0, last = 0;
  for (const auto& x : c) {
    int s = x > 0 ? 1 : (x < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

} // namespace detail

class QuadForm {
public:
  QuadForm() = default;

  explicit QuadForm(IntMat J) : J_(std::move(J))
  {
    const std::size_t n = J_.size();
    if (n % 2 != 0 || n < 4 || n > 8) throw ArgumentError("invalid form: n must be even with 4 <= n <= 8");
    for (const auto& row : J_)
      if (row.size() != n) throw ArgumentError("invalid form: J must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
      if (J_[i][i] % 2 != 0) throw ArgumentError("invalid form: diagonal entries of J must be even");
      for (std::size_t j = 0; j < i; ++j)
        if (J_[i][j] != J_[j][i]) throw ArgumentError("invalid form: J must be symmetric");
    }
    BigMat b(n, std::vector<BigInt>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b[i][j] = J_[i][j];
    det_ = detail::bareiss_det(b);
    if (det_ == 0) throw ArgumentError("invalid form: det J must be nonzero");
    adj_ = detail::adjugate(J_, det_);
    auto c = detail::charpoly(J_);
    int pos = detail::sign_changes(c);
    for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    int neg = detail::sign_changes(c);
    if (pos + neg != static_cast<int>(n)) throw NumericalError("signature count mismatch");
    sig_ = {pos, neg};
  }

  int n() const { return static_cast<int>(J_.size()); }
  const IntMat& J() const { return J_; }
  i64 J(int i, int j) const { return J_[i][j]; }
  const BigInt& det() const { return det_; }
  std::pair<int, int> signature() const { return sig_; }
  bool definite() const { return sig_.first == 0 || sig_.second == 0; }
  // det(J) * J^{-1}
  const BigMat& adj() const { return adj_; }

  i128 evaluate_raw(const IntVec& x) const
  {
    i128 s = 0;
    for (int i = 0; i < n(); ++i) {
      s += static_cast<i128>(J_[i][i] / 2) * x[i] * x[i];
      for (int j = i + 1; j < n(); ++j) s += static_cast<i128>(J_[i][j]) * x[i] * x[j];
    }
    return s;
  }

  BigInt evaluate(const IntVec& x) const
  {
    check_dim(x);
    BigInt s = 0;
    for (int i = 0; i < n(); ++i) {
      s += BigInt(J_[i][i] / 2) * x[i] * x[i];
      for (int j = i + 1; j < n(); ++j) s += BigInt(J_[i][j]) * x[i] * x[j];
    }
    return s;
  }

  // x^T J y
  BigInt bilinear(const IntVec& x, const IntVec& y) const
  {
    check_dim(x);
    check_dim(y);
    BigInt s = 0;
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j) s += BigInt(J_[i][j]) * x[i] * y[j];
    return s;
  }

  IntVec apply(const IntVec& x) const
  {
    check_dim(x);
    IntVec y(n(), 0);
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j) y[i] += J_[i][j] * x[j];
    return y;
  }

  // Connected components of the off-diagonal support of J.
  std::vector<std::vector<int>> blocks() const
  {
    std::vector<int> comp(n(), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n(); ++s) {
      if (comp[s] >= 0) continue;
      std::vector<int> stack{s}, members;
      comp[s] = static_cast<int>(out.size());
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        members.push_back(v);
        for (int w = 0; w < n(); ++w)
          if (w != v && J_[v][w] != 0 && comp[w] < 0) {
            comp[w] = comp[s];
            stack.push_back(w);
          }
      }
      std::sort(members.begin(), members.end());
      out.push_back(members);
    }
    return out;
  }

  QuadForm transformed(const IntMat& U) const
  {
    IntMat out(n(), IntVec(n(), 0));
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j) {
        i64 s = 0;
        for (int k = 0; k < n(); ++k)
          for (int l = 0; l < n(); ++l) s += U[k][i] * J_[k][l] * U[l][j];
        out[i][j] = s;
      }
    return QuadForm(out);
  }

  std::string canonical() const
  {
    std::ostringstream os;
    os << n();
    for (const auto& row : J_)
      for (i64 v : row) os << ',' << v;
    return os.str();
  }

  std::string hash() const
  {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
  }

  bool operator==(const QuadForm& o) const { return J_ == o.J_; }

private:
  void check_dim(const IntVec& x) const
  {
    if (static_cast<int>(x.size()) != n()) throw ArgumentError("dimension mismatch: vector length differs from n");
  }

  IntMat J_;
  BigInt det_;
  BigMat adj_;
  std::pair<int, int> sig_{0, 0};
};

// Q^v(x) = Q(J^{-1}x) = x^T M x / (2 denom) with denom = |det J|.
struct DualForm {
  BigInt denom;
  BigMat M;

  explicit DualForm(const QuadForm& q) : denom(abs(q.det())), M(q.adj())
  {
    if (q.det() < 0)
      for (auto& row : M)
        for (auto& v : row) v = -v;
  }

  BigInt numerator_value(const IntVec& x) const
  {
    if (x.size() != M.size()) throw ArgumentError("dimension mismatch: vector length differs from n");
    BigInt s = 0;
    for (std::size_t i = 0; i < M.size(); ++i)
      for (std::size_t j = 0; j < M.size(); ++j) s += M[i][j] * x[i] * x[j];
    return s;
  }

  Rational evaluate(const IntVec& x) const { return Rational(numerator_value(x), 2 * denom); }
  bool is_zero(const IntVec& x) const { return numerator_value(x) == 0; }
};

inline BigInt evaluate(const QuadForm& q, const IntVec& x) { return q.evaluate(x); }
inline Rational dual_evaluate(const QuadForm& q, const IntVec& x) { return DualForm(q).evaluate(x); }

struct DiscriminantCharacter {
  BigInt D0 = 1;
  bool trivial = true;

  int operator()(i64 m) const { return kronecker(D0, m); }
};

inline DiscriminantCharacter discriminant_character(const QuadForm& q)
{
  BigInt d = (q.n() / 2) % 2 ? BigInt(-q.det()) : q.det();
  DiscriminantCharacter g;
  g.D0 = fundamental_discriminant(d);
  g.trivial = g.D0 == 1;
  return g;
}

// Bad primes for the local computations: 2 and every prime dividing det J.
inline std::vector<i64> bad_primes(const QuadForm& q)
{
  auto ps = prime_divisors(q.det() == 1 || q.det() == -1 ? BigInt(2) : BigInt(2 * q.det()));
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

inline QuadForm form_from_json(const nlohmann::json& j)
{
  if (!j.is_object() || !j.contains("J")) throw ArgumentError("invalid form: expected object with field \"J\"");
  IntMat J;
  try {
    J = j.at("J").get<IntMat>();
  } catch (const nlohmann::json::exception&) {
    throw ArgumentError("invalid form: J must be a matrix of integers");
  }
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<i64>() != static_cast<i64>(J.size()))
      throw ArgumentError("invalid form: n must equal the number of rows of J");
  }
  return QuadForm(J);
}

inline nlohmann::json form_to_json(const QuadForm& q) { return {{"n", q.n()}, {"J", q.J()}}; }

namespace forms {

inline QuadForm hyperbolic_sum(int copies)
{
  IntMat J(2 * copies, IntVec(2 * copies, 0));
  for (int i = 0; i < copies; ++i) J[2 * i][2 * i + 1] = J[2 * i + 1][2 * i] = 1;
  return QuadForm(J);
}

inline QuadForm diagonal(const IntVec& d)
{
  IntMat J(d.size(), IntVec(d.size(), 0));
  for (std::size_t i = 0; i < d.size(); ++i) J[i][i] = d[i];
  return QuadForm(J);
}

// x1 x2 + x3^2 - 3 x4^2: det 12, bad at 2 and 3
inline QuadForm mixed()
{
  return QuadForm(IntMat{{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, -6}});
}

} // namespace forms

} // namespace qcensus

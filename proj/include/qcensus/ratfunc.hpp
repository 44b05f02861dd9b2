#pragma once

#include <string>
#include <vector>

#include "arith.hpp"

namespace qcensus {

// Dense polynomial over Q, coefficient i multiplies u^i.
class Poly {
public:
  Poly() = default;
  Poly(std::initializer_list<Rational> c) : c_(c) { trim(); }
  explicit Poly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }
  static Poly constant(const Rational& a) { return Poly(std::vector<Rational>{a}); }
  static Poly monomial(const Rational& a, int deg)
  {
    std::vector<Rational> c(deg + 1, Rational(0));
    c[deg] = a;
    return Poly(c);
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool zero() const { return c_.empty(); }
  Rational operator[](int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Rational(0); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

  Poly operator+(const Poly& o) const
  {
    std::vector<Rational> r(std::max(c_.size(), o.c_.size()), Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return Poly(r);
  }
  Poly operator-() const
  {
    auto r = c_;
    for (auto& x : r) x = -x;
    return Poly(r);
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }
  Poly operator*(const Poly& o) const
  {
    if (zero() || o.zero()) return {};
    std::vector<Rational> r(c_.size() + o.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(r);
  }
  Poly operator*(const Rational& a) const
  {
    auto r = c_;
    for (auto& x : r) x *= a;
    return Poly(r);
  }
  bool operator==(const Poly& o) const { return c_ == o.c_; }

  // polynomial long division
  std::pair<Poly, Poly> divmod(const Poly& d) const
  {
    if (d.zero()) throw ArgumentError("polynomial division by zero");
    std::vector<Rational> r = c_;
    int dd = d.degree();
    if (degree() < dd) return {Poly{}, *this};
    std::vector<Rational> q(degree() - dd + 1, Rational(0));
    for (int i = degree(); i >= dd; --i) {
      Rational f = r[i] / d.lead();
      q[i - dd] = f;
      if (f == 0) continue;
      for (int j = 0; j <= dd; ++j) r[i - dd + j] -= f * d.c_[j];
    }
    r.resize(dd);
    return {Poly(q), Poly(r)};
  }

  Rational eval(const Rational& u) const
  {
    Rational s = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * u + *it;
    return s;
  }
  template <class T>
  T eval_num(T u) const
  {
    T s = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * u + T(static_cast<double>(*it));
    return s;
  }
  Poly derivative() const
  {
    if (c_.size() <= 1) return {};
    std::vector<Rational> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long long>(i);
    return Poly(r);
  }

  std::string str() const
  {
    if (zero()) return "0";
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[i].str() + ")";
      if (i > 0) s += "*u^" + std::to_string(i);
    }
    return s;
  }

private:
  void trim()
  {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

inline Poly poly_gcd(Poly a, Poly b)
{
  while (!b.zero()) {
    auto r = a.divmod(b).second;
    a = b;
    b = r;
  }
  if (a.zero()) return a;
  return a * (Rational(1) / a.lead());
}

// 1 - a u^k
inline Poly one_minus(const Rational& a, int k = 1) { return Poly::constant(1) - Poly::monomial(a, k); }

enum class Provenance { closed_form, reconstructed };

// num/den with den(0) = 1 and no common factor.
class RationalFunction {
public:
  RationalFunction() : num_(Poly::constant(0)), den_(Poly::constant(1)) {}
  RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }
  static RationalFunction poly(Poly p) { return RationalFunction(std::move(p), Poly::constant(1)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  RationalFunction operator*(const RationalFunction& o) const { return {num_ * o.num_, den_ * o.den_}; }
  RationalFunction operator/(const RationalFunction& o) const { return {num_ * o.den_, den_ * o.num_}; }
  RationalFunction operator+(const RationalFunction& o) const { return {num_ * o.den_ + o.num_ * den_, den_ * o.den_}; }
  RationalFunction operator-(const RationalFunction& o) const { return {num_ * o.den_ - o.num_ * den_, den_ * o.den_}; }
  bool operator==(const RationalFunction& o) const { return num_ == o.num_ && den_ == o.den_; }

  // power-series coefficients c_0..c_{K}
  std::vector<Rational> series(int K) const
  {
    std::vector<Rational> c(K + 1, Rational(0));
    for (int k = 0; k <= K; ++k) {
      Rational s = num_[k];
      for (int j = 1; j <= std::min(k, den_.degree()); ++j) s -= den_[j] * c[k - j];
      c[k] = s / den_[0];
    }
    return c;
  }

  Rational eval(const Rational& u) const
  {
    Rational d = den_.eval(u);
    if (d == 0) throw PoleError("rational function evaluated at a pole");
    return num_.eval(u) / d;
  }
  template <class T>
  T eval_num(T u) const
  {
    return num_.eval_num(u) / den_.eval_num(u);
  }
  RationalFunction derivative() const
  {
    return {num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_};
  }

  std::string str() const { return "[" + num_.str() + "] / [" + den_.str() + "]"; }

private:
  void normalize()
  {
    if (den_.zero()) throw ArgumentError("rational function with zero denominator");
    if (num_.zero()) {
      den_ = Poly::constant(1);
      return;
    }
    Poly g = poly_gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = num_.divmod(g).first;
      den_ = den_.divmod(g).first;
    }
    Rational d0 = den_[0];
    if (d0 == 0) {
      // leave pole at u = 0 unnormalized by leading coefficient
      Rational l = den_.lead();
      num_ = num_ * (Rational(1) / l);
      den_ = den_ * (Rational(1) / l);
      return;
    }
    num_ = num_ * (Rational(1) / d0);
    den_ = den_ * (Rational(1) / d0);
  }

  Poly num_, den_;
};

} // namespace qcensus

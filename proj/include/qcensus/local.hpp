#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "form.hpp"
#include "ratfunc.hpp"

namespace qcensus {

struct PrimeContext {
  i64 p = 2;
  bool good = false;
  int kmax = 6;
};

inline PrimeContext make_context(const QuadForm& q, i64 p, int kmax = 6)
{
  if (!is_prime(p)) throw ArgumentError("make_context: p must be prime");
  return {p, p != 2 && q.det() % p != 0, kmax};
}

class ReconstructionError : public Error {
public:
  ReconstructionError(const std::string& m, std::vector<Rational> table)
      : Error(ErrorKind::reconstruction, m), table_(std::move(table))
  {
  }
  // a_k = p^{-kn} N_k(xi) for the k that were computed
  const std::vector<Rational>& partial_table() const { return table_; }

private:
  std::vector<Rational> table_;
};

enum class CountStrategy { automatic, enumerate, hensel, shift };

inline const char* strategy_name(CountStrategy s)
{
  switch (s) {
  case CountStrategy::automatic: return "auto";
  case CountStrategy::enumerate: return "enumerate";
  case CountStrategy::hensel: return "hensel";
  case CountStrategy::shift: return "shift";
  }
  return "?";
}

struct ExpSumTable {
  i64 p = 0;
  IntVec xi;
  std::vector<BigInt> exact;                     // N_k(xi), k = 0..kmax
  std::vector<std::complex<double>> values;      // same, as complex numbers
  std::vector<CountStrategy> strategy;           // how each entry was obtained
  BigInt count(int k) const { return exact.at(k); }
};

// e(r/M) for r mod M
class RootTable {
public:
  explicit RootTable(i64 M) : M_(M), tab_(static_cast<std::size_t>(M))
  {
    for (i64 r = 0; r < M; ++r) {
      long double a = 2.0L * 3.14159265358979323846264338327950288L * static_cast<long double>(r) / M;
      tab_[r] = {std::cos(a), std::sin(a)};
    }
  }
  const std::complex<long double>& operator[](i64 r) const { return tab_[static_cast<std::size_t>(mod(r, M_))]; }

private:
  i64 M_;
  std::vector<std::complex<long double>> tab_;
};

namespace detail {

struct BlockPoints {
  std::vector<int> idx;
  std::vector<i64> q;  // Q_b(w) mod M
  std::vector<i64> l;  // <xi_b, w> mod M
};

// All points of a block modulo M.
inline BlockPoints block_points(const QuadForm& f, const std::vector<int>& idx, i64 M, const IntVec& xi)
{
  BlockPoints bp;
  bp.idx = idx;
  const int d = static_cast<int>(idx.size());
  i64 total = 1;
  for (int i = 0; i < d; ++i) total *= M;
  bp.q.resize(total);
  bp.l.resize(total);
  std::vector<i64> w(d, 0);
  for (i64 t = 0; t < total; ++t) {
    i128 qq = 0, ll = 0;
    for (int a = 0; a < d; ++a) {
      qq += static_cast<i128>(f.J(idx[a], idx[a]) / 2) * w[a] * w[a];
      for (int b = a + 1; b < d; ++b) qq += static_cast<i128>(f.J(idx[a], idx[b])) * w[a] * w[b];
      ll += static_cast<i128>(xi[idx[a]]) * w[a];
    }
    bp.q[t] = static_cast<i64>(((qq % M) + M) % M);
    bp.l[t] = static_cast<i64>(((ll % M) + M) % M);
    for (int a = d - 1; a >= 0; --a) {
      if (++w[a] < M) break;
      w[a] = 0;
    }
  }
  return bp;
}

using Hist = std::vector<unsigned __int128>;

inline Hist cyclic_convolve(const Hist& a, const Hist& b)
{
  const std::size_t M = a.size();
  Hist c(M, 0);
  for (std::size_t i = 0; i < M; ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < M; ++j)
      if (b[j]) c[(i + j) % M] += a[i] * b[j];
  }
  return c;
}

inline BigInt to_big(unsigned __int128 v)
{
  BigInt r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

inline double log2_work(i64 p, int k, const std::vector<std::vector<int>>& blocks, bool with_a)
{
  double lp = std::log2(static_cast<double>(p));
  double best = 0;
  for (const auto& b : blocks) best = std::max(best, k * lp * static_cast<double>(b.size()));
  double w = std::max(best, 2 * k * lp) + std::log2(static_cast<double>(blocks.size()) + 1);
  return with_a ? w + k * lp : w;
}

} // namespace detail

// Exact counts N_k(xi) = sum over w mod p^k with Q(w) = 0 of e(<xi,w>/p^k).
class CountEngine {
public:
  CountEngine(const QuadForm& f, i64 p, double log2_budget = 28.0)
      : f_(f), dual_(f), p_(p), budget_(log2_budget), blocks_(f.blocks()), unimodular_(f.det() % p != 0)
  {
  }

  i64 p() const { return p_; }
  const QuadForm& form() const { return f_; }

  BigInt count(int k, const IntVec& xi, CountStrategy s = CountStrategy::automatic)
  {
    if (k == 0) return 1;
    IntVec r = reduce(xi, k);
    auto key = std::make_pair(k, r);
    if (s == CountStrategy::automatic) {
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    BigInt v = compute(k, r, s);
    if (s == CountStrategy::automatic) memo_[key] = v;
    return v;
  }

  CountStrategy choose(int k, const IntVec& xi) const
  {
    bool zero = is_zero_mod(xi, k);
    if (unimodular_ && zero) return CountStrategy::hensel;
    if (shift_ok(xi) && 2 * k * std::log2(static_cast<double>(p_)) <= 24.0) return CountStrategy::shift;
    if (detail::log2_work(p_, k, blocks_, !zero) <= budget_) return CountStrategy::enumerate;
    throw ResourceError("count budget exceeded at (p=" + std::to_string(p_) + ", k=" + std::to_string(k) + ")");
  }

  // persisted-cache hooks
  const std::map<std::pair<int, IntVec>, BigInt>& memo() const { return memo_; }
  void seed(int k, const IntVec& xi, const BigInt& v) { memo_[{k, reduce(xi, k)}] = v; }

  i64 modulus(int k) const { return ipow(p_, k); }

  IntVec reduce(const IntVec& xi, int k) const
  {
    i64 M = modulus(k);
    IntVec r(f_.n(), 0);
    if (!xi.empty())
      for (int i = 0; i < f_.n(); ++i) r[i] = mod(xi[i], M);
    return r;
  }

private:
  bool is_zero_mod(const IntVec& xi, int k) const
  {
    i64 M = modulus(k);
    for (i64 x : xi)
      if (mod(x, M) != 0) return false;
    return true;
  }

  // completing the square needs Q^v to be p-integral
  bool shift_ok(const IntVec& xi) const
  {
    if (!unimodular_) return false;
    if (p_ != 2) return true;
    for (int i = 0; i < f_.n(); ++i)
      if (dual_.M[i][i] % 2 != 0) return false;
    (void)xi;
    return true;
  }

  BigInt compute(int k, const IntVec& xi, CountStrategy s)
  {
    if (s == CountStrategy::automatic) s = choose(k, xi);
    switch (s) {
    case CountStrategy::hensel: return hensel(k, xi);
    case CountStrategy::shift: return shift(k, xi);
    default: return enumerate(k, xi);
    }
  }

  BigInt enumerate(int k, const IntVec& xi) const
  {
    const i64 M = modulus(k);
    if (is_zero_mod(xi, k)) {
      detail::Hist total;
      for (const auto& b : blocks_) {
        auto bp = detail::block_points(f_, b, M, xi);
        detail::Hist h(M, 0);
        for (i64 v : bp.q) h[v]++;
        total = total.empty() ? h : detail::cyclic_convolve(total, h);
      }
      return detail::to_big(total[0]);
    }
    // a-sum: M * N_k = sum_a sum_w e((a Q(w) + <xi,w>)/M), tracked as a histogram of exponents
    std::vector<detail::BlockPoints> pts;
    for (const auto& b : blocks_) pts.push_back(detail::block_points(f_, b, M, xi));
    detail::Hist T(M, 0);
    for (i64 a = 0; a < M; ++a) {
      detail::Hist acc;
      for (const auto& bp : pts) {
        detail::Hist h(M, 0);
        for (std::size_t t = 0; t < bp.q.size(); ++t) h[static_cast<std::size_t>((mulmod(a, bp.q[t], M) + bp.l[t]) % M)]++;
        acc = acc.empty() ? h : detail::cyclic_convolve(acc, h);
      }
      for (i64 r = 0; r < M; ++r) T[r] += acc[r];
    }
    return trace_value(T);
  }

  BigInt hensel(int k, const IntVec& xi)
  {
    if (!unimodular_) throw UnsupportedError("hensel counting needs p not dividing det J");
    (void)xi;
    if (!p1_) p1_ = enumerate(1, IntVec(f_.n(), 0)) - 1;
    // N_k = P_k + p^n N_{k-2}, P_k = p^{(k-1)(n-1)} P_1
    std::vector<BigInt> N(k + 1);
    N[0] = 1;
    for (int j = 1; j <= k; ++j) {
      BigInt P = *p1_ * bigpow(p_, (j - 1) * (f_.n() - 1));
      N[j] = j == 1 ? P + 1 : P + bigpow(p_, f_.n()) * N[j - 2];
    }
    return N[k];
  }

  // histogram of Q(w) mod p^m
  const detail::Hist& value_hist(int m)
  {
    auto it = vhist_.find(m);
    if (it != vhist_.end()) return it->second;
    const i64 M = modulus(m);
    detail::Hist cnt;
    for (const auto& b : blocks_) {
      auto bp = detail::block_points(f_, b, M, IntVec(f_.n(), 0));
      detail::Hist h(M, 0);
      for (i64 v : bp.q) h[v]++;
      cnt = cnt.empty() ? h : detail::cyclic_convolve(cnt, h);
    }
    return vhist_[m] = std::move(cnt);
  }

  // Completing the square: M N_k = sum_i p^{in} sum_{x unit mod p^m} e(-c/x / p^m) G_m(x), m = k - i,
  // with G_m(x) = sum_w e(x Q(w) / p^m). Exponents are collected mod p^k and reduced by the trace.
  BigInt shift(int k, const IntVec& xi)
  {
    if (!shift_ok(xi)) throw UnsupportedError("shift counting needs J unimodular at p with p-integral dual form");
    const i64 M = modulus(k);
    int v = kInfiniteValuation;
    for (i64 x : xi) v = std::min(v, valuation(x, p_));
    detail::Hist T(M, 0);
    const BigInt det = f_.det();
    for (int i = 0; i <= std::min(k, v); ++i) {
      unsigned __int128 w = 1;
      for (int j = 0; j < i * f_.n(); ++j) w *= static_cast<unsigned __int128>(p_);
      int m = k - i;
      if (m == 0) {
        T[0] += w;
        continue;
      }
      const i64 Mm = modulus(m), lift = ipow(p_, i);
      IntVec eta(f_.n());
      for (int a = 0; a < f_.n(); ++a) eta[a] = xi[a] / lift;
      // c = Q^v(eta) mod p^m = (eta^T adj eta / 2) * det^{-1}
      BigInt num = 0;
      for (int a = 0; a < f_.n(); ++a)
        for (int b = 0; b < f_.n(); ++b) num += f_.adj()[a][b] * eta[a] * eta[b];
      if (num % 2 != 0) throw NumericalError("dual form is not p-integral");
      i64 c = mulmod(mod(BigInt(num / 2), Mm), invmod(mod(det, Mm), Mm), Mm);
      const auto& cnt = value_hist(m);
      for (i64 x = 1; x < Mm; ++x) {
        if (x % p_ == 0) continue;
        const i64 off = mod(-mulmod(invmod(x, Mm), c, Mm), Mm);
        for (i64 r = 0; r < Mm; ++r)
          if (cnt[r]) T[static_cast<std::size_t>(((mulmod(x, r, Mm) + off) % Mm) * lift)] += w * cnt[r];
      }
    }
    return trace_value(T);
  }

  // rational value of sum_r T[r] e(r / M), divided by M
  BigInt trace_value(const detail::Hist& T) const
  {
    const i64 M = static_cast<i64>(T.size());
    BigInt val = detail::to_big(T[0]);
    BigInt edge = 0;
    for (i64 r = M / p_; r < M; r += M / p_) edge += detail::to_big(T[r]);
    if (edge % (p_ - 1) != 0) throw NumericalError("exponential sum trace is not integral");
    val -= edge / (p_ - 1);
    if (val % M != 0) throw NumericalError("exponential sum is not divisible by the modulus");
    return val / M;
  }

  const QuadForm& f_;
  DualForm dual_;
  i64 p_;
  double budget_;
  std::vector<std::vector<int>> blocks_;
  bool unimodular_;
  std::optional<BigInt> p1_;
  std::map<int, detail::Hist> vhist_;
  std::map<std::pair<int, IntVec>, BigInt> memo_;
};

inline ExpSumTable count_table(const QuadForm& f, const PrimeContext& ctx, const IntVec& xi,
                               CountStrategy s = CountStrategy::automatic)
{
  CountEngine eng(f, ctx.p);
  ExpSumTable t;
  t.p = ctx.p;
  t.xi = xi.empty() ? IntVec(f.n(), 0) : xi;
  for (int k = 0; k <= ctx.kmax; ++k) {
    CountStrategy used = k == 0 ? CountStrategy::enumerate : (s == CountStrategy::automatic ? eng.choose(k, t.xi) : s);
    BigInt v = eng.count(k, t.xi, used);
    t.exact.push_back(v);
    t.values.push_back({static_cast<double>(v), 0.0});
    t.strategy.push_back(used);
  }
  return t;
}

// Quadratic Gauss sum sum_{y mod p^k} e(u y^2 / p^k), odd p, closed form.
inline std::complex<double> gauss_sum(i64 p, int k, i64 u)
{
  if (p == 2) throw UnsupportedError("gauss_sum: p = 2 is handled by direct counting only");
  if (!is_prime(p)) throw ArgumentError("gauss_sum: p must be prime");
  if (k < 1) throw ArgumentError("gauss_sum: k must be positive");
  if (mod(u, p) == 0) throw ArgumentError("gauss_sum: u must be a unit");
  double half = std::pow(static_cast<double>(p), (k - 1) / 2);
  if (k % 2 == 0) return {std::pow(static_cast<double>(p), k / 2), 0.0};
  double sq = std::sqrt(static_cast<double>(p));
  double chi = static_cast<double>(legendre(u, p));
  if (p % 4 == 1) return {half * chi * sq, 0.0};
  return {0.0, half * chi * sq};
}

inline std::complex<double> gauss_sum_direct(i64 p, int k, i64 u)
{
  i64 M = ipow(p, k);
  RootTable e(M);
  std::complex<long double> s = 0;
  for (i64 y = 0; y < M; ++y) s += e[mulmod(u, mulmod(y, y, M), M)];
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

// gamma(t^{-1} Q) for v(t) = v at a good prime
inline std::complex<double> weil_index(const QuadForm& f, const PrimeContext& ctx, int v)
{
  if (!ctx.good) throw UnsupportedError("weil_index: requires a good prime");
  if (v < 0) throw ArgumentError("weil_index: valuation must be nonnegative");
  int chi = discriminant_character(f)(ctx.p);
  return {v % 2 == 0 ? 1.0 : static_cast<double>(chi), 0.0};
}

// p^{-vn/2} sum_{w mod p^v} e(Q(w)/p^v), computed block by block
inline std::complex<double> normalized_count_integral(const QuadForm& f, i64 p, int v)
{
  if (v == 0) return 1.0;
  i64 M = ipow(p, v);
  RootTable e(M);
  std::complex<long double> prod = 1;
  for (const auto& b : f.blocks()) {
    auto bp = detail::block_points(f, b, M, IntVec(f.n(), 0));
    std::complex<long double> s = 0;
    for (i64 q : bp.q) s += e[q];
    prod *= s;
  }
  prod /= std::pow(static_cast<long double>(p), static_cast<long double>(v) * f.n() / 2);
  return {static_cast<double>(prod.real()), static_cast<double>(prod.imag())};
}

struct LocalFactor {
  i64 p = 0;
  RationalFunction rf;
  Provenance provenance = Provenance::closed_form;
  int stabilization_depth = 0;  // reconstructed only
  Rational tail_ratio = 0;      // reconstructed only

  std::vector<Rational> series(int K) const { return rf.series(K); }
};

inline int xi_content_valuation(const IntVec& xi, i64 p)
{
  int v = kInfiniteValuation;
  for (i64 x : xi) v = std::min(v, valuation(x, p));
  return v;
}

// Closed form at a good prime, variable u = p^{-s}.
inline LocalFactor euler_factor_closed(const QuadForm& f, i64 p, const IntVec& xi)
{
  const int n = f.n();
  const Rational eps = discriminant_character(f)(p);
  const Rational pinv = Rational(1, p);
  const Rational r0 = eps * rpow(pinv, n / 2);
  const Rational r1 = eps * rpow(pinv, n / 2 + 1);
  LocalFactor lf;
  lf.p = p;
  lf.provenance = Provenance::closed_form;
  bool zero = true;
  for (i64 x : xi) zero = zero && x == 0;
  if (xi.empty() || zero) {
    lf.rf = RationalFunction(one_minus(r1), one_minus(pinv) * one_minus(r0));
    return lf;
  }
  int a = xi_content_valuation(xi, p);
  BigInt qd = DualForm(f).numerator_value(xi);
  RationalFunction total;
  for (int j = 0; j <= a; ++j) {
    RationalFunction inner;
    if (qd == 0) {
      inner = RationalFunction(Poly::constant(1), one_minus(r0));
    } else {
      int b = valuation(qd, p) - 2 * j;
      std::vector<Rational> c(b + 1);
      for (int m = 0; m <= b; ++m) c[m] = rpow(r0, m);
      inner = RationalFunction::poly(Poly(c));
    }
    total = total + RationalFunction::poly(Poly::monomial(rpow(pinv, j), j)) * inner;
  }
  lf.rf = RationalFunction::poly(one_minus(r1)) * total;
  return lf;
}

struct ReconstructOptions {
  int kmin = 5;
  int kmax = 12;
  double log2_budget = 28.0;
};

namespace detail {

// a_k(xi) = p^{-kn} N_k(xi) for k = 0..K
inline std::vector<Rational> normalized_counts(CountEngine& eng, const IntVec& xi, int K)
{
  std::vector<Rational> a;
  const int n = eng.form().n();
  for (int k = 0; k <= K; ++k) a.push_back(Rational(eng.count(k, xi), bigpow(eng.p(), k * n)));
  return a;
}

inline bool is_zero_vec(const IntVec& v)
{
  for (i64 x : v)
    if (x) return false;
  return true;
}

struct Certified {
  RationalFunction rf;
  int k0 = 0;
  Rational ratio = 0;
};

// Geometric-tail certificate for the primitive part; nullopt if not yet stable.
inline std::optional<Certified> certify(const std::vector<Rational>& pi, std::optional<Rational> forced)
{
  const int K = static_cast<int>(pi.size()) - 1;
  for (int k0 = 1; k0 + 2 <= K; ++k0) {
    Rational r;
    if (pi[k0] == 0) {
      r = 0;
    } else {
      r = pi[k0 + 1] / pi[k0];
    }
    if (forced && r != 0 && r != *forced) continue;
    bool ok = true;
    for (int k = k0 + 1; k <= K && ok; ++k) ok = pi[k] == r * pi[k - 1];
    if (!ok) continue;
    if (r >= 1 || r <= -1) continue;
    std::vector<Rational> head(pi.begin(), pi.begin() + k0);
    Poly h(head);
    Poly tail = Poly::monomial(pi[k0], k0);
    RationalFunction rf = RationalFunction::poly(h) + RationalFunction(tail, one_minus(r));
    return Certified{rf, k0, r};
  }
  return std::nullopt;
}

} // namespace detail

// Rational function for I_p at a bad (or any) prime from exact counts.
inline LocalFactor reconstruct_bad_prime(CountEngine& eng, const IntVec& xi_in, const ReconstructOptions& opt = {})
{
  const i64 p = eng.p();
  const int n = eng.form().n();
  const Rational pn = rpow(Rational(1, p), n);
  IntVec xi = xi_in.empty() ? IntVec(n, 0) : xi_in;

  std::vector<Rational> last_table;
  for (int K = opt.kmin; K <= opt.kmax; ++K) {
    std::vector<Rational> a;
    try {
      a = detail::normalized_counts(eng, xi, K);
    } catch (const ResourceError&) {
      break;
    }
    last_table = a;
    const bool zero = detail::is_zero_vec(xi);
    const bool divisible = !zero && xi_content_valuation(xi, p) >= 1;

    std::vector<Rational> pi = a;
    LocalFactor sub;
    if (zero) {
      for (int k = 2; k <= K; ++k) pi[k] = a[k] - pn * a[k - 2];
    } else if (divisible) {
      IntVec down(n);
      for (int i = 0; i < n; ++i) down[i] = xi[i] / p;
      ReconstructOptions o2 = opt;
      o2.kmin = std::max(2, K - 2);
      sub = reconstruct_bad_prime(eng, down, o2);
      auto as = sub.rf.series(K);
      for (int k = 2; k <= K; ++k) pi[k] = a[k] - pn * as[k - 2];
    }
    auto cert = detail::certify(pi, zero ? std::optional<Rational>(Rational(1, p)) : std::nullopt);
    if (!cert) continue;
    RationalFunction rf = cert->rf;
    if (zero)
      rf = RationalFunction(rf.num(), rf.den() * (Poly::constant(1) - Poly::monomial(pn, 2)));
    else if (divisible)
      rf = rf + RationalFunction::poly(Poly::monomial(pn, 2)) * sub.rf;
    auto chk = rf.series(K);
    bool agree = true;
    for (int k = 0; k <= K; ++k) agree = agree && chk[k] == a[k];
    if (!agree) continue;
    LocalFactor lf;
    lf.p = p;
    lf.rf = rf;
    lf.provenance = Provenance::reconstructed;
    lf.stabilization_depth = cert->k0;
    lf.tail_ratio = cert->ratio;
    return lf;
  }
  throw ReconstructionError("stabilization not certified at p=" + std::to_string(p), last_table);
}

inline LocalFactor reconstruct_bad_prime(const QuadForm& f, const PrimeContext& ctx, const IntVec& xi,
                                         const ReconstructOptions& opt = {})
{
  CountEngine eng(f, ctx.p, opt.log2_budget);
  ReconstructOptions o = opt;
  o.kmax = std::max(ctx.kmax, opt.kmin);
  return reconstruct_bad_prime(eng, xi, o);
}

inline LocalFactor euler_factor(const QuadForm& f, const PrimeContext& ctx, const IntVec& xi)
{
  if (ctx.good) return euler_factor_closed(f, ctx.p, xi);
  ReconstructOptions o;
  o.kmax = std::max(ctx.kmax, 12);
  return reconstruct_bad_prime(f, ctx, xi, o);
}

// (1 - u/p) * I_p evaluated at u = p^{-s}, s an integer
inline Rational regularized_value(const LocalFactor& lf, int s)
{
  RationalFunction reg = RationalFunction::poly(one_minus(Rational(1, lf.p))) * lf.rf;
  Rational u = s <= 0 ? Rational(bigpow(lf.p, -s)) : Rational(1, bigpow(lf.p, s));
  if (reg.den().eval(u) == 0) throw PoleError("regularized_value: pole at s=" + std::to_string(s));
  return reg.eval(u);
}

inline double regularized_value(const LocalFactor& lf, double s)
{
  RationalFunction reg = RationalFunction::poly(one_minus(Rational(1, lf.p))) * lf.rf;
  long double u = std::pow(static_cast<long double>(lf.p), -static_cast<long double>(s));
  long double d = reg.den().eval_num(u);
  if (d == 0) throw PoleError("regularized_value: pole");
  return static_cast<double>(reg.num().eval_num(u) / d);
}

inline double factor_value(const LocalFactor& lf, double s)
{
  long double u = std::pow(static_cast<long double>(lf.p), -static_cast<long double>(s));
  long double d = lf.rf.den().eval_num(u);
  if (d == 0) throw PoleError("factor_value: pole");
  return static_cast<double>(lf.rf.num().eval_num(u) / d);
}

// Value of I_p at integer s (u = p^{-s}).
inline Rational factor_value(const LocalFactor& lf, int s)
{
  Rational u = s <= 0 ? Rational(bigpow(lf.p, -s)) : Rational(1, bigpow(lf.p, s));
  return lf.rf.eval(u);
}

} // namespace qcensus

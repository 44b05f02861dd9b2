#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arch.hpp"
#include "lattice.hpp"
#include "lfunc.hpp"
#include "local.hpp"
#include "parallel.hpp"

namespace qcensus {

struct Estimate {
  double value = 0;
  double error = 0;
};

inline nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"error", e.error}}; }

inline void require_indefinite(const QuadForm& f)
{
  if (f.definite()) throw DomainError("definite form: no real zeros away from the origin, the main term is absent");
}

inline double zeta2() { return kPi * kPi / 6; }

// Coefficients of zeta(s+2) H(s) near s = -1 for n = 4 with trivial character, where the
// good-prime product is zeta(s+1) zeta(s+2) / zeta(s+3) and H(s) collects the bad-prime corrections.
struct LogCaseSeries {
  double h0 = 0, h1 = 0;
};

inline LogCaseSeries log_case_series(const QuadForm& f, int kmax = 12)
{
  LogCaseSeries out;
  double h0 = 1 / zeta2();
  double ratio = 0;
  for (i64 p : bad_primes(f)) {
    auto lf = euler_factor(f, make_context(f, p, kmax), {});
    const Rational ip(1, p);
    RationalFunction C = lf.rf * RationalFunction::poly(one_minus(ip)) * RationalFunction::poly(one_minus(ip * ip)) /
                         RationalFunction::poly(one_minus(ip * ip * ip));
    const Rational u(p);
    const double c = to_double(C.eval(u));
    const double dc = to_double(C.derivative().eval(u));
    // d/ds = -u log p d/du
    const double dcs = -static_cast<double>(p) * std::log(static_cast<double>(p)) * dc;
    h0 *= c;
    ratio += dcs / c;
  }
  out.h0 = h0;
  out.h1 = h0 * (ratio - riemann_zeta_derivative(2.0) / zeta2());
  return out;
}

struct MainConstant {
  Estimate c1;                    // coefficient of X^{n-2}
  std::optional<Estimate> c_log;  // coefficient of X^2 log X (n = 4, trivial character)
  ArchLaurent laurent;
  SeriesValue series;
};

inline MainConstant main_constant(const QuadForm& f, const ArchSpec& spec, int kmax = 12)
{
  require_indefinite(f);
  spec.validate(f.n());
  MainConstant out;
  out.laurent = arch_laurent(spec, f);
  SingularSeriesOptions so;
  so.kmax = kmax;
  out.series = singular_series(f, so);
  const auto& L = out.laurent;
  const double z0 = -0.5, z1 = -0.5 * std::log(2 * kPi);
  if (!out.series.regularized) {
    // residue d_{-1} zeta(0) times the singular series
    out.c1.value = L.d_m1 * z0 * out.series.value;
    out.c1.error = 0.5 * 2 * L.mu0_err * std::abs(out.series.value) + std::abs(L.d_m1 * z0) * out.series.error;
    return out;
  }
  auto H = log_case_series(f, kmax);
  Estimate cl;
  cl.value = L.d_m1 * z0 * H.h0;
  cl.error = std::abs(z0 * H.h0) * 2 * L.mu0_err + 1e-13 * std::abs(cl.value);
  out.c_log = cl;
  const double k1 = z1 * H.h0 + z0 * H.h1 + kEulerGamma * z0 * H.h0;
  out.c1.value = L.d0 * z0 * H.h0 + L.d_m1 * k1;
  out.c1.error = L.err * (std::abs(z0 * H.h0) + std::abs(k1)) + 1e-12 * std::abs(out.c1.value);
  return out;
}

struct CrossCheck {
  Estimate residue_route;
  Estimate coarea_route;
  double difference = 0;
  bool agree = false;
};

// Leading constant two ways: Laurent residue of the archimedean difference, and the co-area
// singular integral, each times the singular series.
inline CrossCheck cross_check_c1(const QuadForm& f, const ArchSpec& spec, int kmax = 12)
{
  require_indefinite(f);
  SingularSeriesOptions so;
  so.kmax = kmax;
  auto S = singular_series(f, so);
  auto L = arch_laurent(spec, f);
  auto co = coarea_singular_integral(spec, f);
  CrossCheck c;
  c.residue_route.value = L.d_m1 * -0.5 * S.value;
  c.residue_route.error = L.mu0_err * std::abs(S.value) + L.mu0 * S.error;
  c.coarea_route.value = co.value * S.value;
  c.coarea_route.error = co.error * std::abs(S.value) + co.value * S.error;
  c.difference = c.residue_route.value - c.coarea_route.value;
  c.agree = std::abs(c.difference) <= c.residue_route.error + c.coarea_route.error;
  return c;
}

// ---- secondary terms ----

struct XiGroup {
  IntVec rep;                // first member in sorted order
  std::size_t count = 0;
  double nonarch_sum = 0;    // sum of non-archimedean factors over members
  double arch = 0;           // archimedean difference at s = 1 - n/2
  double arch_err = 0;
  i64 min_norm = 0;          // smallest sup-norm among members
};

struct XiSum {
  double value = 0;
  double error = 0;
  i64 radius = 0;
  double halving_change = 0;  // value(R) - value(R/2)
  std::size_t terms = 0;
  std::vector<XiGroup> groups;
};

struct SecondaryOptions {
  i64 radius = 0;  // 0 selects the radius adaptively
  i64 max_radius = 32;
  double tol = 1e-7;
  int workers = 1;
  int kmax = 12;
};

namespace detail {

inline i64 sup_norm(const IntVec& x)
{
  i64 m = 0;
  for (i64 v : x) m = std::max(m, v < 0 ? -v : v);
  return m;
}

// The kernel depends on xi only through the sums of squared frame coordinates over
// groups of equal pencil eigenvalues.
class ArchKey {
public:
  explicit ArchKey(const Pencil& pen) : pen_(pen)
  {
    const int n = pen.n();
    double scale = pen.lambda.cwiseAbs().maxCoeff();
    group_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      if (group_[i] >= 0) continue;
      group_[i] = groups_++;
      for (int j = i + 1; j < n; ++j)
        if (group_[j] < 0 && std::abs(pen.lambda[i] - pen.lambda[j]) <= 1e-9 * scale) group_[j] = group_[i];
    }
  }

  std::string operator()(const IntVec& xi) const
  {
    Eigen::VectorXd x(pen_.n());
    for (int i = 0; i < pen_.n(); ++i) x[i] = static_cast<double>(xi[i]);
    Eigen::VectorXd z = pen_.frame(x);
    std::vector<double> sums(groups_, 0.0);
    for (int i = 0; i < pen_.n(); ++i) sums[group_[i]] += z[i] * z[i];
    std::string key;
    char buf[40];
    for (double s : sums) {
      std::snprintf(buf, sizeof buf, "%.10e;", s);
      key += buf;
    }
    return key;
  }

private:
  const Pencil& pen_;
  std::vector<int> group_;
  int groups_ = 0;
};

// Bad-prime factor I_p(xi, s0) (1 - 1/p) / (1 - 1/p^2) at a dual zero.
class BadPrimeFactor {
public:
  BadPrimeFactor(const QuadForm& f, i64 p, int kmax) : f_(f), p_(p), kmax_(kmax), eng_(f, p)
  {
    closed_ = f.det() % p != 0 && closed_form_matches();
  }

  bool closed() const { return closed_; }

  double operator()(const IntVec& xi)
  {
    const int s0 = 1 - f_.n() / 2;
    const double reg = (1 - 1.0 / p_) / (1 - 1.0 / (static_cast<double>(p_) * p_));
    if (closed_) {
      int a = xi_content_valuation(xi, p_);
      auto it = by_val_.find(a);
      if (it != by_val_.end()) return it->second;
      double v = to_double(factor_value(euler_factor_closed(f_, p_, xi), s0)) * reg;
      return by_val_[a] = v;
    }
    auto it = memo_.find(xi);
    if (it != memo_.end()) return it->second;
    ReconstructOptions o;
    o.kmax = kmax_;
    auto lf = reconstruct_bad_prime(eng_, xi, o);
    double v = to_double(factor_value(lf, s0)) * reg;
    return memo_[xi] = v;
  }

private:
  // exact counts against the good-prime closed form on a battery of dual zeros
  bool closed_form_matches()
  {
    int K = 2;
    while (std::pow(static_cast<double>(p_), K + 1) <= 64.5) ++K;
    std::vector<IntVec> battery{IntVec(f_.n(), 0)};
    auto z = enumerate_dual_zeros(f_, 2);
    for (const auto& x : z.points) {
      if (detail::is_zero_vec(x)) continue;
      battery.push_back(x);
      if (battery.size() >= 7) break;
    }
    if (battery.size() > 1) {
      IntVec y = battery[1];
      for (int r = 0; r < 2; ++r) {
        for (auto& v : y) v *= p_;
        battery.push_back(y);
      }
    }
    try {
      for (const auto& xi : battery) {
        auto ser = euler_factor_closed(f_, p_, xi).rf.series(K);
        auto a = detail::normalized_counts(eng_, xi, K);
        for (int k = 0; k <= K; ++k)
          if (ser[k] != a[k]) return false;
      }
    } catch (const ResourceError&) {
      return false;
    }
    return true;
  }

  const QuadForm& f_;
  i64 p_;
  int kmax_;
  CountEngine eng_;
  bool closed_ = false;
  std::map<int, double> by_val_;
  std::map<IntVec, double> memo_;
};

// sum_{j=0}^{v} q^{j e}
inline double geometric_divisor_factor(i64 q, int v, int e)
{
  double s = 0, t = 1;
  for (int j = 0; j <= v; ++j, t *= std::pow(static_cast<double>(q), e)) s += t;
  return s;
}

} // namespace detail

// Non-archimedean residue factor of a dual zero xi != 0 at s = 1 - n/2: divisor sum over the
// good part of content(xi), 1/zeta(2), and the bad-prime corrections.
class NonarchFactor {
public:
  NonarchFactor(const QuadForm& f, int kmax = 12) : f_(f), S_(bad_primes(f))
  {
    for (i64 p : S_) bad_.emplace_back(f_, p, kmax);
  }

  double operator()(const IntVec& xi)
  {
    double v = 1 / zeta2();
    i64 c = content(xi);
    for (auto [q, e] : factorize(BigInt(c))) {
      if (std::find(S_.begin(), S_.end(), q) != S_.end()) continue;
      v *= detail::geometric_divisor_factor(q, e, f_.n() / 2 - 2);
    }
    for (auto& b : bad_) v *= b(xi);
    return v;
  }

  const std::vector<i64>& bad_primes_used() const { return S_; }

private:
  const QuadForm& f_;
  std::vector<i64> S_;
  std::deque<detail::BadPrimeFactor> bad_;
};

inline XiSum xi_terms(const QuadForm& f, const ArchSpec& spec, const SecondaryOptions& opt = {})
{
  const int n = f.n();
  const double s0 = 1 - n / 2.0;
  NonarchFactor nonarch(f, opt.kmax);
  Pencil pen = make_pencil(spec, f);
  detail::ArchKey keyof(pen);
  std::map<std::string, ArchValue> arch_cache;

  auto evaluate = [&](i64 R) {
    auto z = enumerate_dual_zeros(f, R);
    std::map<std::string, XiGroup> groups;
    std::vector<std::string> order;
    std::map<std::string, double> half_nonarch;
    for (const auto& xi : z.points) {
      if (detail::is_zero_vec(xi)) continue;
      std::string k = keyof(xi);
      auto it = groups.find(k);
      if (it == groups.end()) {
        XiGroup g;
        g.rep = xi;
        g.min_norm = detail::sup_norm(xi);
        it = groups.emplace(k, g).first;
        order.push_back(k);
      }
      const double na = nonarch(xi);
      const i64 norm = detail::sup_norm(xi);
      it->second.count++;
      it->second.nonarch_sum += na;
      it->second.min_norm = std::min(it->second.min_norm, norm);
      if (norm <= R / 2) half_nonarch[k] += na;
    }
    std::vector<std::string> todo;
    for (const auto& k : order)
      if (!arch_cache.count(k)) todo.push_back(k);
    auto vals = parallel_map<ArchValue>(todo.size(), opt.workers,
                                        [&](std::size_t i) { return arch_difference(spec, f, s0, groups.at(todo[i]).rep); });
    for (std::size_t i = 0; i < todo.size(); ++i) arch_cache[todo[i]] = vals[i];
    XiSum out;
    out.radius = R;
    double half = 0;
    for (const auto& k : order) {
      auto& g = groups.at(k);
      const auto& a = arch_cache.at(k);
      g.arch = a.value.real();
      g.arch_err = a.est_error;
      double term = g.arch * g.nonarch_sum;
      out.value += term;
      out.error += std::abs(g.nonarch_sum) * g.arch_err;
      out.terms += g.count;
      out.groups.push_back(g);
      auto h = half_nonarch.find(k);
      if (h != half_nonarch.end()) half += g.arch * h->second;
    }
    out.halving_change = out.value - half;
    std::sort(out.groups.begin(), out.groups.end(), [](const XiGroup& a, const XiGroup& b) { return a.rep < b.rep; });
    return out;
  };

  if (opt.radius > 0) return evaluate(opt.radius);
  for (i64 R = 4;; R *= 2) {
    auto out = evaluate(R);
    if (std::abs(out.halving_change) <= opt.tol * std::max(1.0, std::abs(out.value))) return out;
    if (2 * R > opt.max_radius)
      throw AnalyticError("xi-term series not converged at radius " + std::to_string(R) + " (shell change " +
                          std::to_string(out.halving_change) + "); increase the radius");
  }
}

struct SecondaryTerms {
  Estimate c2;
  Estimate xi0;  // xi = 0 contribution (n > 4)
  XiSum xi;
};

// Absent when the discriminant character is nontrivial.
inline std::optional<SecondaryTerms> secondary_terms(const QuadForm& f, const ArchSpec& spec, const SecondaryOptions& opt = {})
{
  require_indefinite(f);
  if (!discriminant_character(f).trivial) return std::nullopt;
  const int n = f.n();
  SecondaryTerms out;
  out.xi = xi_terms(f, spec, opt);
  if (n > 4) {
    const int s0 = 1 - n / 2;
    auto d = arch_difference(spec, f, static_cast<double>(s0), IntVec(n, 0));
    double loc = riemann_zeta(2.0 - n / 2.0) / zeta2();
    for (i64 p : bad_primes(f)) {
      auto lf = euler_factor(f, make_context(f, p, opt.kmax), {});
      loc *= to_double(regularized_value(lf, s0)) * (1 - 1.0 / p) / (1 - 1.0 / (static_cast<double>(p) * p));
    }
    out.xi0.value = d.value.real() * loc;
    out.xi0.error = d.est_error * std::abs(loc);
  }
  out.c2.value = out.xi0.value + out.xi.value;
  out.c2.error = out.xi0.error + out.xi.error + std::abs(out.xi.halving_change);
  return out;
}

// ---- fits ----

struct SlopeFit {
  double slope = 0;
  double stderr_ = 0;
  int points = 0;
  bool ok = false;
};

// least squares of log|y| on log x
inline SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  SlopeFit r;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0 && y[i] != 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::abs(y[i])));
    }
  r.points = static_cast<int>(lx.size());
  if (r.points < 2) return r;
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  double mx = sx / m, my = sy / m, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0) return r;
  r.slope = sxy / sxx;
  if (r.points > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      double e = ly[i] - my - r.slope * (lx[i] - mx);
      rss += e * e;
    }
    r.stderr_ = std::sqrt(rss / (m - 2) / sxx);
  }
  r.ok = true;
  return r;
}

// N/X^2 = a log X + b
inline std::pair<double, double> fit_log_term(const std::vector<double>& X, const std::vector<double>& N)
{
  Eigen::MatrixXd V(X.size(), 2);
  Eigen::VectorXd y(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    V(i, 0) = std::log(X[i]);
    V(i, 1) = 1;
    y[i] = N[i] / (X[i] * X[i]);
  }
  Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  return {c[0], c[1]};
}

// ---- prediction report ----

struct GridPoint {
  double X = 0;
  double N = 0;
  double truncation_error = 0;
  double prediction = 0;
  double prediction_error = 0;
  double residual = 0;
};

struct PredictionReport {
  QuadForm form;
  MainConstant main;
  std::optional<SecondaryTerms> secondary;
  std::vector<GridPoint> grid;
  SlopeFit slope;
  double target_slope = 0;
  bool inconclusive = true;
  std::optional<double> fitted_log_coeff;  // n = 4, trivial character
  std::optional<double> fitted_c2;         // mean of (N - c1 X^{n-2} - c_log X^2 log X) / X^{n/2}

  Estimate c1() const { return main.c1; }
  std::optional<Estimate> c_log() const { return main.c_log; }
  std::optional<Estimate> c2() const
  {
    if (!secondary) return std::nullopt;
    return secondary->c2;
  }
};

struct PredictOptions {
  SecondaryOptions secondary;
  int kmax = 12;
};

using Counter = std::function<SmoothedCount(double)>;

inline std::pair<double, double> predict_at(const PredictionReport& r, double X)
{
  const int n = r.form.n();
  double v = r.main.c1.value * std::pow(X, n - 2);
  double e = r.main.c1.error * std::pow(X, n - 2);
  if (r.main.c_log) {
    v += r.main.c_log->value * X * X * std::log(X);
    e += r.main.c_log->error * X * X * std::log(X);
  }
  if (r.secondary) {
    v += r.secondary->c2.value * std::pow(X, n / 2);
    e += r.secondary->c2.error * std::pow(X, n / 2);
  }
  return {v, e};
}

inline PredictionReport predict(const QuadForm& f, const ArchSpec& spec, const PredictOptions& opt = {})
{
  PredictionReport r;
  r.form = f;
  r.main = main_constant(f, spec, opt.kmax);
  r.secondary = secondary_terms(f, spec, opt.secondary);
  r.target_slope = f.n() == 4 ? 1.0 : f.n() / 2.0 - 1;
  return r;
}

// Fills the grid, residuals and fits of a prediction.
inline void verify(PredictionReport& r, const std::vector<double>& grid, const Counter& count)
{
  const int n = r.form.n();
  r.grid.clear();
  std::vector<double> xs, rs, Ns, c2s;
  int dominated = 0;
  for (double X : grid) {
    auto sc = count(X);
    GridPoint g;
    g.X = X;
    g.N = sc.value;
    g.truncation_error = sc.truncation_error;
    auto [p, pe] = predict_at(r, X);
    g.prediction = p;
    g.prediction_error = pe;
    g.residual = g.N - p;
    if (std::abs(g.residual) <= pe + g.truncation_error) ++dominated;
    r.grid.push_back(g);
    xs.push_back(X);
    rs.push_back(g.residual);
    Ns.push_back(g.N);
    double rest = g.N - r.main.c1.value * std::pow(X, n - 2);
    if (r.main.c_log) rest -= r.main.c_log->value * X * X * std::log(X);
    c2s.push_back(rest / std::pow(X, n / 2));
  }
  r.slope = fit_log_slope(xs, rs);
  r.inconclusive = !r.slope.ok || 2 * dominated > static_cast<int>(grid.size());
  if (r.main.c_log && grid.size() >= 2) r.fitted_log_coeff = fit_log_term(xs, Ns).first;
  if (r.secondary && !grid.empty()) {
    double m = 0;
    for (double v : c2s) m += v;
    r.fitted_c2 = m / static_cast<double>(c2s.size());
  }
}

inline PredictionReport verify(const QuadForm& f, const ArchSpec& spec, const std::vector<double>& grid,
                               const PredictOptions& opt = {}, Counter count = {})
{
  auto r = predict(f, spec, opt);
  if (!count) count = [&](double X) { return smoothed_count(f, spec, X); };
  verify(r, grid, count);
  return r;
}

inline nlohmann::json to_json(const PredictionReport& r)
{
  nlohmann::json j;
  j["schema"] = "qcensus.report/1";
  j["form"] = form_to_json(r.form);
  j["form_hash"] = r.form.hash();
  j["c1"] = to_json(r.main.c1);
  j["c_log"] = r.main.c_log ? to_json(*r.main.c_log) : nlohmann::json(nullptr);
  j["c2"] = r.secondary ? to_json(r.secondary->c2) : nlohmann::json(nullptr);
  j["singular_integral"] = {{"value", r.main.laurent.mu0}, {"error", r.main.laurent.mu0_err}};
  j["singular_series"] = {{"value", r.main.series.value}, {"error", r.main.series.error}, {"regularized", r.main.series.regularized}};
  if (r.secondary) {
    const auto& s = *r.secondary;
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& g : s.xi.groups)
      xs.push_back({{"xi", g.rep}, {"count", g.count}, {"nonarch", g.nonarch_sum}, {"arch", g.arch}, {"arch_error", g.arch_err}});
    j["xi_zero_term"] = to_json(s.xi0);
    j["xi_terms"] = xs;
    j["xi_radius"] = s.xi.radius;
    j["xi_halving_change"] = s.xi.halving_change;
  } else {
    j["xi_terms"] = nlohmann::json::array();
  }
  nlohmann::json g = nlohmann::json::array();
  for (const auto& p : r.grid)
    g.push_back({{"X", p.X}, {"N", p.N}, {"truncation_error", p.truncation_error}, {"prediction", p.prediction},
                 {"prediction_error", p.prediction_error}, {"residual", p.residual}});
  j["grid"] = g;
  j["fitted_slope"] = r.slope.ok ? nlohmann::json(r.slope.slope) : nlohmann::json(nullptr);
  j["fitted_slope_error"] = r.slope.stderr_;
  j["target_slope"] = r.target_slope;
  j["inconclusive"] = r.inconclusive;
  j["fitted_log_coeff"] = r.fitted_log_coeff ? nlohmann::json(*r.fitted_log_coeff) : nlohmann::json(nullptr);
  j["fitted_c2"] = r.fitted_c2 ? nlohmann::json(*r.fitted_c2) : nlohmann::json(nullptr);
  return j;
}

inline std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string report_csv(const PredictionReport& r)
{
  std::ostringstream os;
  os << "X,N,truncation_error,prediction,prediction_error,residual\n";
  for (const auto& p : r.grid)
    os << fmt17(p.X) << ',' << fmt17(p.N) << ',' << fmt17(p.truncation_error) << ',' << fmt17(p.prediction) << ','
       << fmt17(p.prediction_error) << ',' << fmt17(p.residual) << '\n';
  return os.str();
}

} // namespace qcensus

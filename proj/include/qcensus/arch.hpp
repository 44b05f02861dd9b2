#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "form.hpp"
#include "lfunc.hpp"
#include "quad.hpp"

namespace qcensus {

using cplx = std::complex<double>;

struct ArchSpec {
  Eigen::MatrixXd A;
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;
  double t_window = 0;  // 0 selects the window from the decay of g and h

  static ArchSpec identity(int n)
  {
    ArchSpec s;
    s.A = Eigen::MatrixXd::Identity(n, n);
    return s;
  }

  static double g(double x) { return std::exp(-kPi * x * x); }
  static double h(double y) { return 2 * kPi * y * y * std::exp(-kPi * y * y); }
  static double g_hat(double w) { return std::exp(-kPi * w * w); }
  static double h_hat(double w) { return (1 - 2 * kPi * w * w) * std::exp(-kPi * w * w); }

  void validate(int n) const
  {
    if (A.rows() != n || A.cols() != n) throw ArgumentError("ArchSpec: A must be n x n");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ArgumentError("ArchSpec: A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.eigenvalues().minCoeff() <= 0) throw ArgumentError("ArchSpec: A must be positive definite");
    if (!(rel_tol > 0 && abs_tol > 0 && max_subdivisions > 0)) throw ArgumentError("ArchSpec: tolerances must be positive");
  }

  QuadOptions quad() const { return {rel_tol, abs_tol, max_subdivisions}; }
};

enum class ArchMethod { direct_strip, mellin, extrapolated };

inline const char* method_name(ArchMethod m)
{
  switch (m) {
  case ArchMethod::direct_strip: return "direct_strip";
  case ArchMethod::mellin: return "mellin";
  case ArchMethod::extrapolated: return "extrapolated";
  }
  return "?";
}

struct ArchValue {
  cplx value;
  double est_error = 0;
  ArchMethod method = ArchMethod::direct_strip;
  int fit_degree = 0;
  double fit_residual = 0;
};

// Simultaneous diagonalization: w = P y turns w^T A w into |y|^2 and Q(w) into (1/2) sum lambda_k y_k^2.
struct Pencil {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd P;
  double det_A = 1;

  Pencil(const Eigen::MatrixXd& A, const Eigen::MatrixXd& J)
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A);
    Eigen::MatrixXd L = ea.eigenvectors() * ea.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * ea.eigenvectors().transpose();
    Eigen::MatrixXd C = L * J * L;
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(C);
    lambda = ec.eigenvalues();
    P = L * ec.eigenvectors();
    det_A = ea.eigenvalues().prod();
  }

  int n() const { return static_cast<int>(lambda.size()); }

  // coordinates of eta in the diagonal frame
  Eigen::VectorXd frame(const Eigen::VectorXd& eta) const { return P.transpose() * eta; }

  // int f(w) e(sigma Q(w) - <eta, w>) dw with zeta = frame(eta); principal roots factor by factor
  cplx kernel(double sigma, const Eigen::VectorXd& zeta2) const
  {
    cplx prod = 1.0 / std::sqrt(det_A);
    cplx ex = 0;
    for (int k = 0; k < n(); ++k) {
      cplx a(1.0, -sigma * lambda[k]);
      prod /= std::sqrt(a);
      if (zeta2[k] != 0) ex += zeta2[k] / a;
    }
    if (ex != cplx(0)) prod *= std::exp(-kPi * ex);
    return prod;
  }

  cplx phi(double tau) const { return kernel(tau, Eigen::VectorXd::Zero(n())); }
};

inline Eigen::MatrixXd to_eigen(const IntMat& J)
{
  const int n = static_cast<int>(J.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = static_cast<double>(J[i][j]);
  return M;
}

inline Pencil make_pencil(const ArchSpec& spec, const QuadForm& f)
{
  spec.validate(f.n());
  return Pencil(spec.A, to_eigen(f.J()));
}

inline Eigen::VectorXd squared_frame(const Pencil& pen, const Eigen::VectorXd& eta)
{
  Eigen::VectorXd z = pen.frame(eta);
  return z.cwiseProduct(z);
}

// Fourier transform of w -> psi(x Q(w)) at w, for a real symmetric invertible J of any size.
inline cplx gaussian_phase_ft(const Eigen::MatrixXd& J, double x, const Eigen::VectorXd& w)
{
  if (x == 0) throw ArgumentError("gaussian_phase_ft: x must be nonzero");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x * J);
  int a = 0, b = 0;
  double absdet = 1;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()[i];
    if (ev == 0) throw ArgumentError("gaussian_phase_ft: J must be invertible");
    (ev > 0 ? a : b)++;
    absdet *= std::abs(ev);
  }
  cplx gamma = std::exp(cplx(0, -kPi * (a - b) / 4.0));
  double qdual = 0.5 * w.dot(J.inverse() * w);
  return gamma / std::sqrt(absdet) * std::exp(cplx(0, 2 * kPi * qdual / x));
}

inline cplx gaussian_phase_ft(const QuadForm& f, double x, const std::vector<double>& w)
{
  if (static_cast<int>(w.size()) != f.n()) throw ArgumentError("dimension mismatch: vector length differs from n");
  return gaussian_phase_ft(to_eigen(f.J()), x, Eigen::Map<const Eigen::VectorXd>(w.data(), f.n()));
}

// int exp(-pi w^T A w) e(-(theta Q(w) + <xi, w>)/t) dw
inline cplx inner_w_integral(const ArchSpec& spec, const QuadForm& f, double theta, double t, const std::vector<double>& xi)
{
  if (t == 0) throw ArgumentError("inner_w_integral: t must be nonzero");
  Pencil pen = make_pencil(spec, f);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(f.n());
  for (int i = 0; i < f.n() && i < static_cast<int>(xi.size()); ++i) eta[i] = xi[i] / t;
  return pen.kernel(-theta / t, squared_frame(pen, eta));
}

namespace detail {

inline ArchValue direct_strip(const ArchSpec& spec, const Pencil& pen, cplx s, const Eigen::VectorXd& xi, bool swapped)
{
  auto w1 = swapped ? &ArchSpec::g : &ArchSpec::h;
  auto w2 = swapped ? &ArchSpec::h_hat : &ArchSpec::g_hat;
  const bool zero = xi.squaredNorm() == 0;
  const Eigen::VectorXd z2 = squared_frame(pen, xi);
  QuadOptions inner = spec.quad();
  inner.rel_tol = spec.rel_tol * 0.1;
  inner.abs_tol = spec.abs_tol * 0.1;
  double inner_err = 0;  // max over t of the weighted inner error
  bool inner_ok = true;

  // R(t) = 2 int_0^inf w2(t sigma) K(sigma, xi/t) dsigma, real for real xi; the mass sits near
  // sigma ~ 1 (kernel scale) and sigma ~ 1/t (weight scale)
  auto R = [&](double t, double weight) -> double {
    Eigen::VectorXd zt = z2 / (t * t);
    auto fv = [&](double sg) -> double { return w2(t * sg) * pen.kernel(sg, zt).real(); };
    double b1 = std::min(1.0, 1.0 / t), b2 = std::max(1.0, 1.0 / t);
    auto r1 = integrate<double>(fv, 0.0, b1, inner);
    auto logv = [&](double y) -> double {
      double sg = std::exp(y);
      return fv(sg) * sg;
    };
    auto r2 = integrate<double>(logv, std::log(b1), std::log(b2), inner);
    auto tail = [&](double x) -> double { return x <= 0 ? 0.0 : fv(b2 / x) * b2 / (x * x); };
    auto r3 = integrate<double>(tail, 0.0, 1.0, inner);
    double err = r1.error + r2.error + r3.error;
    inner_err = std::max(inner_err, weight * 2 * err);
    inner_ok = inner_ok && r1.converged && r2.converged && r3.converged;
    return 2 * (r1.value + r2.value + r3.value);
  };

  double alpha = s.real() + 1 + (swapped ? 0 : 2) + (zero ? 0 : pen.n() / 2.0 - 1);
  if (alpha <= 0) throw DomainError("arch_integral: s outside the convergence strip of the direct method");
  double umin = std::max(-600.0, std::log(spec.abs_tol * 0.1 * alpha) / alpha);
  double umax = spec.t_window > 0 ? spec.t_window : std::log(7.0);
  auto outer = [&](double u) -> cplx {
    double t = std::exp(u);
    double wt = w1(t) * std::exp((s.real() + 1.0) * u);
    return w1(t) * std::exp((s + 1.0) * u) * R(t, wt);
  };
  auto r = integrate<cplx>(outer, umin, umax, spec.quad());
  if (!r.converged || !inner_ok)
    throw ResourceError("arch_integral: quadrature budget exhausted (" + std::to_string(r.intervals) + " outer intervals, error " +
                        std::to_string(r.error) + ")");
  ArchValue out;
  out.value = 2.0 * r.value;
  out.est_error = 2 * r.error + 2 * inner_err * (umax - umin) + 1e-12 * std::abs(out.value);
  out.method = ArchMethod::direct_strip;
  return out;
}

// int_R phi(tau) (1+tau^2)^{-c} tau^{2m} dtau
inline QuadResult<cplx> phi_moment(const ArchSpec& spec, const Pencil& pen, cplx c, int m)
{
  auto fv = [&](double tau) -> cplx {
    double q = 1 + tau * tau;
    return 2.0 * pen.phi(tau).real() * std::pow(q, -c) * std::pow(tau, 2 * m);
  };
  return integrate_half_line<cplx>(fv, spec.quad());
}

inline ArchValue mellin_zero(const ArchSpec& spec, const Pencil& pen, cplx s, bool swapped)
{
  ArchValue out;
  out.method = ArchMethod::mellin;
  if (!swapped) {
    auto m = phi_moment(spec, pen, (s + 3.0) / 2.0, 0);
    cplx pre = 2 * kPi * cgamma((s + 3.0) / 2.0) * std::pow(kPi, -(s + 3.0) / 2.0);
    out.value = pre * m.value;
    out.est_error = std::abs(pre) * m.error;
    return out;
  }
  if (std::abs(s + 1.0) < 1e-12) throw PoleError("arch_integral: swapped integral has a pole at s = -1");
  auto m0 = phi_moment(spec, pen, (s + 1.0) / 2.0, 0);
  auto m1 = phi_moment(spec, pen, (s + 3.0) / 2.0, 1);
  cplx p0 = cgamma((s + 1.0) / 2.0) * std::pow(kPi, -(s + 1.0) / 2.0);
  cplx p1 = 2 * kPi * cgamma((s + 3.0) / 2.0) * std::pow(kPi, -(s + 3.0) / 2.0);
  out.value = p0 * m0.value - p1 * m1.value;
  out.est_error = std::abs(p0) * m0.error + std::abs(p1) * m1.error;
  return out;
}

} // namespace detail

// I(Phi, 1_s)(xi) over R; swapped selects Phi^sw.
inline ArchValue arch_integral(const ArchSpec& spec, const QuadForm& f, cplx s, const IntVec& xi, bool swapped,
                               std::optional<ArchMethod> method = std::nullopt)
{
  Pencil pen = make_pencil(spec, f);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.n());
  bool zero = true;
  for (int i = 0; i < f.n() && i < static_cast<int>(xi.size()); ++i) {
    x[i] = static_cast<double>(xi[i]);
    zero = zero && xi[i] == 0;
  }
  ArchMethod m;
  if (method) {
    m = *method;
  } else if (!zero) {
    if (s.real() <= -f.n() / 2.0 + 0.05) throw DomainError("arch_integral: Re(s) must exceed -n/2 for xi != 0");
    m = ArchMethod::direct_strip;
  } else {
    m = s.real() > -0.7 ? ArchMethod::direct_strip : ArchMethod::mellin;
  }
  if (m == ArchMethod::mellin) {
    if (!zero) throw UnsupportedError("arch_integral: the closed Mellin route needs xi = 0");
    if (s.real() <= -f.n() / 2.0) throw DomainError("arch_integral: Re(s) must exceed -n/2");
    return detail::mellin_zero(spec, pen, s, swapped);
  }
  if (m == ArchMethod::extrapolated) throw UnsupportedError("arch_integral: extrapolation applies to the difference only");
  return detail::direct_strip(spec, pen, s, x, swapped);
}

// D(s) = I(Phi) - I(Phi^sw)
inline ArchValue arch_difference(const ArchSpec& spec, const QuadForm& f, cplx s, const IntVec& xi,
                                 std::optional<ArchMethod> method = std::nullopt)
{
  bool zero = true;
  for (i64 v : xi) zero = zero && v == 0;
  if (zero && (!method || *method == ArchMethod::mellin) && (method || s.real() <= -0.7)) {
    // closed form: s Gamma((s+1)/2) pi^{-(s+1)/2} int phi (1+tau^2)^{-(s+1)/2}
    Pencil pen = make_pencil(spec, f);
    if (s.real() <= -f.n() / 2.0) throw DomainError("arch_difference: Re(s) must exceed -n/2");
    if (std::abs(s + 1.0) < 1e-12) throw PoleError("arch_difference: pole at s = -1");
    auto m = detail::phi_moment(spec, pen, (s + 1.0) / 2.0, 0);
    cplx pre = s * cgamma((s + 1.0) / 2.0) * std::pow(kPi, -(s + 1.0) / 2.0);
    return {pre * m.value, std::abs(pre) * m.error, ArchMethod::mellin, 0, 0};
  }
  auto a = arch_integral(spec, f, s, xi, false, method);
  auto b = arch_integral(spec, f, s, xi, true, method);
  return {a.value - b.value, a.est_error + b.est_error, a.method, 0, 0};
}

// Laurent data of D(0, s) at s = -1: D = d_m1/(s+1) + d0 + O(s+1).
struct ArchLaurent {
  double mu0 = 0, mu0_err = 0;  // singular integral int phi
  double d_m1 = 0, d0 = 0, err = 0;
};

inline ArchLaurent arch_laurent(const ArchSpec& spec, const QuadForm& f)
{
  Pencil pen = make_pencil(spec, f);
  auto q = spec.quad();
  auto m0 = integrate_half_line<double>([&](double t) { return 2 * pen.phi(t).real(); }, q);
  auto m1 = integrate_half_line<double>([&](double t) { return 2 * pen.phi(t).real() * std::log1p(t * t); }, q);
  ArchLaurent L;
  L.mu0 = m0.value;
  L.mu0_err = m0.error;
  L.d_m1 = -2 * m0.value;
  L.d0 = (2 + kEulerGamma + std::log(kPi)) * m0.value + m1.value;
  L.err = 4 * (m0.error + m1.error) + 1e-13 * std::abs(L.d0);
  return L;
}

// Residue of D(0, s) at s = -1 by polynomial extrapolation of (s+1) D(s) from Re(s) in [-0.7, -0.3].
inline ArchValue extrapolate_residue(const ArchSpec& spec, const QuadForm& f, int degree = 4, int points = 8)
{
  Eigen::MatrixXd V(points, degree + 1);
  Eigen::VectorXd y(points);
  double err = 0;
  for (int i = 0; i < points; ++i) {
    double s = -0.7 + 0.4 * i / (points - 1);
    auto d = arch_difference(spec, f, s, IntVec(f.n(), 0), ArchMethod::direct_strip);
    y[i] = (s + 1) * d.value.real();
    err = std::max(err, (s + 1) * d.est_error);
    for (int j = 0; j <= degree; ++j) V(i, j) = std::pow(s + 1, j);
  }
  Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  double resid = (V * c - y).norm() / std::sqrt(static_cast<double>(points));
  ArchValue out;
  out.value = c[0];
  out.method = ArchMethod::extrapolated;
  out.fit_degree = degree;
  out.fit_residual = resid;
  // amplification of data error at the extrapolation point
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(degree + 1);
  e0[0] = 1;
  Eigen::VectorXd wts = V * (V.transpose() * V).inverse() * e0;
  out.est_error = wts.cwiseAbs().sum() * (err + resid);
  // model error: spread against the next lower degree
  if (degree >= 1) {
    Eigen::VectorXd c2 = V.leftCols(degree).colPivHouseholderQr().solve(y);
    out.est_error += std::abs(c2[0] - c[0]);
  }
  return out;
}

namespace detail {

struct Group {
  double c;
  int d;
};

inline std::vector<Group> group_values(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  std::vector<Group> g;
  for (double x : v) {
    if (!g.empty() && std::abs(x - g.back().c) <= 1e-10 * std::max(1.0, std::abs(x)))
      g.back().d++;
    else
      g.push_back({x, 1});
  }
  return g;
}

// E[F(sum c_g X_g)] for X ~ Dirichlet(d_1/2, ..., d_G/2)
inline double dirichlet_expectation(const std::vector<Group>& gs, std::size_t from, const std::function<double(double)>& F,
                                    const QuadOptions& q, double& rel)
{
  if (from + 1 == gs.size()) return F(gs[from].c);
  double p = gs[from].d / 2.0;
  double rest = 0;
  for (std::size_t i = from + 1; i < gs.size(); ++i) rest += gs[i].d / 2.0;
  double logB = std::lgamma(p) + std::lgamma(rest) - std::lgamma(p + rest);
  auto integrand = [&](double th) {
    double sn = std::sin(th), cs = std::cos(th), x = sn * sn;
    double dens = 2 * std::pow(sn, 2 * p - 1) * std::pow(cs, 2 * rest - 1) * std::exp(-logB);
    double c1 = gs[from].c;
    std::function<double(double)> G = [&](double y) { return F(c1 * x + (1 - x) * y); };
    double v = dirichlet_expectation(gs, from + 1, G, q, rel);
    return dens * v;
  };
  auto r = integrate<double>(integrand, 0.0, kPi / 2, q);
  rel = std::max(rel, r.error / std::max(1e-300, std::abs(r.value)));
  return r.value;
}

inline double sphere_area(int d) { return 2 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0); }

} // namespace detail

struct CoareaValue {
  double value = 0;
  double error = 0;
};

// Singular integral int_{Q=0} f / |grad Q| dS by integrating out the radii in polar coordinates on both signature halves.
inline CoareaValue coarea_singular_integral(const Eigen::MatrixXd& A, const Eigen::MatrixXd& J, const QuadOptions& q = {1e-11, 1e-14, 2000})
{
  Pencil pen(A, J);
  const int n = pen.n();
  std::vector<double> pos, neg;
  for (int k = 0; k < n; ++k) (pen.lambda[k] > 0 ? pos : neg).push_back(0.5 * std::abs(pen.lambda[k]));
  if (pos.empty() || neg.empty()) throw DomainError("coarea_singular_integral: form is definite");
  if (n <= 2) throw DomainError("coarea_singular_integral: the singular integral diverges for n <= 2");
  const int a = static_cast<int>(pos.size()), b = static_cast<int>(neg.size());
  auto gp = detail::group_values(pos), gn = detail::group_values(neg);
  const double radial = 0.5 * std::tgamma(n / 2.0 - 1);
  double rel = 0;
  std::function<double(double)> outer = [&](double alpha) {
    std::function<double(double)> inner = [&](double beta) {
      double r = alpha / beta;
      return std::pow(r, (b - 2) / 2.0) / (2 * beta) * radial * std::pow(kPi * (1 + r), 1 - n / 2.0);
    };
    return detail::dirichlet_expectation(gn, 0, inner, q, rel);
  };
  double v = detail::dirichlet_expectation(gp, 0, outer, q, rel);
  double scale = detail::sphere_area(a) * detail::sphere_area(b) / std::sqrt(pen.det_A);
  return {v * scale, (2 * rel + 1e-13) * std::abs(v) * scale};
}

inline CoareaValue coarea_singular_integral(const ArchSpec& spec, const QuadForm& f)
{
  spec.validate(f.n());
  return coarea_singular_integral(spec.A, to_eigen(f.J()));
}

} // namespace qcensus

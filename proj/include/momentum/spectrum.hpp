#pragma once
/**
 * @file spectrum.hpp
 * @brief Point spectrum: the whole-axis eigenvalue test, the interval
 *        characteristic function, constant potentials and asymptotics.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "greens.hpp"
#include "numerics.hpp"
#include "oracle.hpp"
#include "potentials.hpp"
#include "resolvent.hpp"

namespace momentum {

using Sampler = std::function<cplx(double)>;

/**
 * One eigenvalue with its eigenfunctions.
 *
 * Axis results: defect1/defect2 are the two jump-condition defects at 0.
 * Interval results: defect1 is the relative smallest singular value of the
 * linear system at lambda, defect2 the relative residual of the eigenfunction
 * in the differential equation and boundary condition.
 */
struct EigenResult {
  double lambda = 0.0;
  int multiplicity = 1;
  std::vector<Sampler> eigenfunctions;
  double defect1 = 0.0;
  double defect2 = 0.0;
  std::string method;
  std::optional<cplx> chi_combined;  ///< characteristic function of v1 + e^{i alpha} v2, when only diagnostic
};

// ================================================================== whole axis

struct AxisCandidate {
  double lambda = 0.0;
  cplx left0 = 0.0, right0 = 0.0;  ///< psi(-0), psi(+0)
  bool square_integrable = true;
  double tail = 0.0;  ///< |psi|^2 mass beyond the truncation radius
  std::function<cplx(Point)> psi;
};

namespace detail {

/// Decay rate of the tails on each side (0 when a tail does not decay; +inf when there is none).
inline std::pair<double, double> tail_rates(const Potential& v) {
  double left = inf, right = inf;
  for (const auto& p : v.pieces()) {
    if (std::isinf(p.hi)) right = std::min(right, std::max(0.0, -p.rate.real()));
    if (std::isinf(p.lo)) left = std::min(left, std::max(0.0, p.rate.real()));
  }
  return {left, right};
}

}  // namespace detail

/**
 * psi(x) = -i int_x^inf e^{-i lambda (x-y)} v(y) dy for x > 0 and
 * i int_-inf^x e^{-i lambda (x-y)} v(y) dy for x < 0.
 *
 * Not square-integrable when a tail of v does not decay, or when the mass of
 * |psi|^2 beyond the truncation radius is >= 1e-10.
 */
inline AxisCandidate axis_candidate(double lambda, const Potential& v, const QuadratureSpec& q = {}) {
  require_domain(v, Domain::axis, "axis_candidate");
  AxisCandidate c;
  c.lambda = lambda;
  const auto [lrate, rrate] = detail::tail_rates(v);
  if (lrate == 0.0 || rrate == 0.0) {
    c.square_integrable = false;
    c.tail = inf;
    c.psi = [](Point) { return cplx(std::nan(""), std::nan("")); };
    return c;
  }
  auto vp = std::make_shared<Potential>(v);
  auto f = [vp, lambda, q](Point p) -> cplx {
    const bool left = p.x < 0.0 || (p.x == 0.0 && p.side == Side::minus);
    if (left) return I * shifted_moment(*vp, lambda, p.x, -inf, p.x, q);
    return -I * shifted_moment(*vp, lambda, p.x, p.x, inf, q);
  };
  c.psi = f;
  c.left0 = f(minus0());
  c.right0 = f(plus0());
  const double R = axis_truncation;
  if (std::isfinite(rrate)) c.tail += std::norm(f(Point(R))) / (2.0 * rrate);
  if (std::isfinite(lrate)) c.tail += std::norm(f(Point(-R))) / (2.0 * lrate);
  c.square_integrable = c.tail < 1e-10;
  return c;
}

struct AxisEigenTest {
  bool accepted = false;
  bool square_integrable = true;
  double defect1 = 0.0;  ///< |psi(-0) + e^{-i alpha} psi(+0) - 2|
  double defect2 = 0.0;  ///< |psi(-0) - e^{-i alpha} psi(+0) + i <psi, v>|
  cplx inner = 0.0;      ///< <psi, v>
  EigenResult result;
};

inline double axis_condition1(const AxisCandidate& c, BoundaryPhase alpha) {
  return std::abs(c.left0 + std::conj(alpha.unit()) * c.right0 - 2.0);
}

/// Accepts lambda iff psi is square-integrable and both jump conditions hold within tol.
inline AxisEigenTest axis_eigen_test(double lambda, const Potential& v, BoundaryPhase alpha, double tol = 1e-10,
                                     const QuadratureSpec& q = {}) {
  const auto c = axis_candidate(lambda, v, q);
  AxisEigenTest t;
  t.square_integrable = c.square_integrable;
  if (!c.square_integrable) {
    t.defect1 = t.defect2 = inf;
    return t;
  }
  const cplx ec = std::conj(alpha.unit());
  t.inner = inner_fn(c.psi, v, q);
  t.defect1 = axis_condition1(c, alpha);
  t.defect2 = std::abs(c.left0 - ec * c.right0 + I * t.inner);
  t.accepted = t.defect1 < tol && t.defect2 < tol;
  auto psi = c.psi;
  t.result = {lambda, 1, {[psi](double x) { return psi(Point(x)); }}, t.defect1, t.defect2, "axis-test", {}};
  return t;
}

/// Max |i psi' + v (psi(-0) + e^{-i alpha} psi(+0))/2 - lambda psi| on [-span, span], away from 0 and breakpoints.
inline double axis_eigen_residual(double lambda, const Potential& v, BoundaryPhase alpha, double span = 5.0,
                                  int points = 1000, double step = 1e-3) {
  const auto c = axis_candidate(lambda, v);
  const cplx ps = 0.5 * (c.left0 + std::conj(alpha.unit()) * c.right0);
  auto breaks = v.breakpoints();
  breaks.push_back(0.0);
  const PointFn f = c.psi;
  double r = 0.0;
  for (int k = 0; k <= points; ++k) {
    const double x = -span + 2.0 * span * k / points;
    bool near = false;
    for (double b : breaks) near = near || std::abs(x - b) < 3.5 * step;
    if (near) continue;
    r = std::max(r, std::abs(I * derivative(f, x, step) + v(x) * ps - lambda * f(Point(x))));
  }
  return r;
}

/**
 * Scan lambda in [lo, hi] on a grid; local minima of |condition 1| below 0.1
 * are refined by Gauss-Newton on the complex condition and then tested.
 */
inline std::vector<EigenResult> axis_scan(const Potential& v, BoundaryPhase alpha, double lo, double hi,
                                          double step = 1e-3, double tol = 1e-10) {
  if (!(lo < hi) || !(step > 0.0)) throw InputError("axis_scan: need lo < hi and step > 0");
  const cplx ec = std::conj(alpha.unit());
  auto cond = [&](double l) {
    const auto c = axis_candidate(l, v);
    return c.square_integrable ? c.left0 + ec * c.right0 - 2.0 : cplx(inf);
  };
  const int n = int(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> xs(n), fs(n);
  for (int k = 0; k < n; ++k) {
    xs[k] = lo + k * step;
    fs[k] = std::abs(cond(xs[k]));
  }
  std::vector<EigenResult> out;
  for (int k = 0; k < n; ++k) {
    const bool left_ok = k == 0 || fs[k] <= fs[k - 1];
    const bool right_ok = k + 1 == n || fs[k] <= fs[k + 1];
    if (!(left_ok && right_ok) || !(fs[k] < 0.1)) continue;
    double l = xs[k];
    for (int it = 0; it < 100; ++it) {
      const cplx f = cond(l);
      if (std::abs(f) < 1e-15) break;
      const double h = 1e-6;
      const cplx d = (cond(l + h) - cond(l - h)) / (2.0 * h);
      if (std::norm(d) == 0.0) break;
      const double delta = -std::real(std::conj(d) * f) / std::norm(d);
      l += std::clamp(delta, -step, step);
      if (std::abs(delta) < 1e-15 * std::max(1.0, std::abs(l))) break;
    }
    if (l < lo - step || l > hi + step) continue;
    auto t = axis_eigen_test(l, v, alpha, tol);
    if (!t.accepted) continue;
    if (!out.empty() && std::abs(out.back().lambda - l) < 1e-8) continue;
    out.push_back(t.result);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return out;
}

// ================================================================== interval characteristic function

struct CharacteristicEval {
  double lambda = 0.0;
  cplx chi = 0.0;
  cplx tilde = 0.0;  ///< int_0^1 e^{i lambda y} v(y) dy
  cplx hat = 0.0;    ///< int_0^1 conj(v(x)) int_0^x e^{-i lambda (x-y)} v(y) dy dx
  Eigen::Matrix2cd system;  ///< acts on (C1, C2) of psi = C1 e^{-i lambda x} - i C2 int_0^x e^{-i lambda (x-y)} v
};

/// Determinant of the 2x2 system for the operator with one potential v and phase alpha.
inline CharacteristicEval chi_general(double lambda, const Potential& v, BoundaryPhase alpha,
                                      const QuadratureSpec& q = {}) {
  require_domain(v, Domain::interval, "chi_general");
  CharacteristicEval c;
  c.lambda = lambda;
  c.tilde = tilde_v(v, lambda, q);
  c.hat = hat_v(v, lambda, q);
  const cplx e = alpha.unit(), em = std::exp(-I * lambda);
  c.system << em - e + I * e * std::conj(c.tilde), -I * (em * c.tilde + I * e * c.hat),  //
      2.0 * I + std::conj(c.tilde), I * (2.0 - c.hat);
  c.chi = c.system.determinant();
  return c;
}

/// chi(lambda) e^{i(lambda - alpha)/2}, which is real for real lambda.
inline double chi_real(double lambda, const Potential& v, BoundaryPhase alpha, const QuadratureSpec& q = {}) {
  return std::real(chi_general(lambda, v, alpha, q).chi * std::exp(0.5 * I * (lambda - alpha.value())));
}

/// Closed form for v = V on [0, 1] and alpha = pi: 4 + 2 ((e^{-i lambda} - 1)/lambda) [lambda + conj(V) - V + (i/2)|V|^2].
inline cplx chi_const(double lambda, cplx V) {
  const cplx q = -I * phi1(cplx(0.0, -lambda));  // (e^{-i lambda} - 1)/lambda
  return 4.0 + 2.0 * q * (lambda + std::conj(V) - V + 0.5 * I * std::norm(V));
}

struct SpectralCharacteristic {
  cplx V;
  double S;
  bool resonant;
};

/// S(V) = Im V - |V|^2/4 = 1 - |V - 2i|^2/4; resonant when |S - 1| <= 1e-12.
inline SpectralCharacteristic spectral_characteristic(cplx V) {
  const double S = V.imag() - 0.25 * std::norm(V);
  return {V, S, std::abs(S - 1.0) <= 1e-12};
}

/// F(xi) = tan(pi xi/4)/(pi xi/4); poles at xi = 2 mod 4.
inline double F(double xi) {
  const double u = 0.25 * pi * xi;
  const double k = std::round((xi - 2.0) / 4.0);
  if (std::abs(xi - (2.0 + 4.0 * k)) <= 1e-12) throw PoleError(2.0 + 4.0 * k, "F: tangent pole");
  if (std::abs(u) < 1e-4) return 1.0 + u * u / 3.0 + 2.0 * u * u * u * u / 15.0;
  return std::tan(u) / u;
}

namespace detail {

/// Pole-free brackets of tan(lambda/2) covering (0, R], each split in `parts`.
inline std::vector<Bracket> positive_pole_free(double R, int parts) {
  std::vector<Bracket> out;
  double a = 0.0;
  for (int k = 0; a < R; ++k) {
    const double pole = (2 * k + 1) * pi;
    const double gap = 1e-9 * std::max(1.0, pole);
    const double b = std::min(pole - gap, R);
    if (a < b)
      for (const auto& s : subdivide(a, b, parts)) out.push_back(s);
    a = pole + gap;
  }
  return out;
}

inline double l2_norm2(const Sampler& f) {
  return integrate([&](double x) { return cplx(std::norm(f(x))); }, 0.0, 1.0).real();
}

inline cplx l2_inner(const Sampler& f, const Sampler& g) {
  return integrate([&](double x) { return f(x) * std::conj(g(x)); }, 0.0, 1.0);
}

/// Orthonormalize in L2(0, 1).
inline std::vector<Sampler> orthonormalize(std::vector<Sampler> fs) {
  std::vector<Sampler> out;
  for (auto& f : fs) {
    Sampler g = f;
    for (const auto& e : out) {
      const cplx c = l2_inner(g, e);
      g = [g, e, c](double x) { return g(x) - c * e(x); };
    }
    const double n = std::sqrt(l2_norm2(g));
    if (n < 1e-12) continue;
    out.push_back([g, n](double x) { return g(x) / n; });
  }
  return out;
}

/// Null space of a 2x2 matrix as coefficient pairs; dimension 2 when the matrix vanishes.
inline std::vector<Eigen::Vector2cd> null_space2(const Eigen::Matrix2cd& m, double scale) {
  if (m.cwiseAbs().maxCoeff() <= 1e-9 * scale) return {Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)};
  Eigen::Vector2cd a(-m(0, 1), m(0, 0)), b(-m(1, 1), m(1, 0));
  return {a.norm() >= b.norm() ? a : b};
}

/// Relative residual of psi in i psi' + v1 P1 + v2 P2 = lambda psi and in the interval boundary condition.
inline double interval_eigen_residual(double lambda, const Potential& v1, const Potential& v2, BoundaryPhase alpha,
                                      const Sampler& psi, int points = 200, double step = 1e-3) {
  const QuadratureSpec q{};
  const cplx a1 = v1.is_zero() ? 0.0 : inner_product(psi, v1, q), a2 = v2.is_zero() ? 0.0 : inner_product(psi, v2, q);
  const cplx p0 = psi(0.0), p1 = psi(1.0);
  const cplx P1 = p0 - 0.5 * I * a1, P2 = p1 + 0.5 * I * a2;
  double scale = 0.0;
  for (int k = 0; k <= points; ++k) scale = std::max(scale, std::abs(psi(double(k) / points)));
  auto breaks = v1.breakpoints();
  for (double b : v2.breakpoints()) breaks.push_back(b);
  const PointFn f = [&](Point p) { return psi(p.x); };
  double r = 0.0;
  for (int k = 0; k <= points; ++k) {
    const double x = double(k) / points;
    if (x < 3.5 * step || x > 1.0 - 3.5 * step) continue;
    bool near = false;
    for (double b : breaks) near = near || std::abs(x - b) < 3.5 * step;
    if (near) continue;
    r = std::max(r, std::abs(I * derivative(f, x, step) + v1(x) * P1 + v2(x) * P2 - lambda * psi(x)));
  }
  r /= scale * std::max(1.0, std::abs(lambda));
  const double bc = std::abs(p1 + I * a2 - alpha.unit() * (p0 - I * a1)) / scale;
  return std::max(r, bc);
}

inline double relative_smallest_singular(const Eigen::MatrixXcd& m) {
  const auto s = singular_values(m);
  return s(0) == 0.0 ? 0.0 : s(s.size() - 1) / s(0);
}

/// Eigen-result for a root of the single-potential characteristic function.
inline EigenResult chi_eigen_result(double lambda, const Potential& v, BoundaryPhase alpha, int multiplicity,
                                    const std::string& method) {
  const auto c = chi_general(lambda, v, alpha);
  const double scale = std::max(1.0, c.system.cwiseAbs().maxCoeff());
  auto vp = std::make_shared<Potential>(v);
  std::vector<Sampler> raw;
  for (const auto& n : null_space2(c.system, scale)) {
    const cplx c1 = n(0), c2 = n(1);
    raw.push_back([vp, lambda, c1, c2](double x) {
      return c1 * std::exp(-I * lambda * x) - I * c2 * shifted_moment(*vp, lambda, x, 0.0, x);
    });
  }
  EigenResult r;
  r.lambda = lambda;
  r.eigenfunctions = orthonormalize(raw);
  r.multiplicity = multiplicity;
  r.defect1 = relative_smallest_singular(c.system);
  r.defect2 = 0.0;
  for (const auto& f : r.eigenfunctions)
    r.defect2 = std::max(r.defect2, interval_eigen_residual(lambda, v, Potential::zero(), alpha, f));
  r.method = method;
  return r;
}

}  // namespace detail

/**
 * Eigenvalues of the alpha = pi operator with v = V on [0, 1].
 *
 * Roots of tan(lambda/2)/(lambda/2) = 1/S(V) on pole-free brackets; S = 0
 * gives the lattice (2n-1) pi and the resonant V = 2i adds lambda = 0 with
 * multiplicity 2. Positive roots are mirrored, so the list is symmetric.
 */
inline std::vector<EigenResult> eigenvalues_const(cplx V, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw InputError("eigenvalues_const: finite lo < hi");
  const auto sc = spectral_characteristic(V);
  const auto v = Potential::constant(V);
  const BoundaryPhase alpha(pi);
  const double R = std::max(std::abs(lo), std::abs(hi));
  std::vector<double> pos;
  if (std::abs(sc.S) <= 1e-12) {
    for (double l = pi; l <= R; l += 2.0 * pi) pos.push_back(l);
  } else {
    const double s = 1.0 / sc.S;
    const auto f = [s](double l) { return F(2.0 * l / pi) - s; };
    for (const auto& r : find_real_roots_detailed(f, detail::positive_pole_free(R, 8), 1e-12))
      if (r.x > 1e-6) pos.push_back(r.x);
  }
  std::vector<double> all;
  for (double l : pos) {
    all.push_back(l);
    all.push_back(-l);
  }
  if (sc.resonant) all.push_back(0.0);
  std::sort(all.begin(), all.end());
  std::vector<EigenResult> out;
  for (double l : all)
    if (lo <= l && l <= hi) out.push_back(detail::chi_eigen_result(l, v, alpha, l == 0.0 ? 2 : 1, "chi-const"));
  return out;
}

/**
 * Two-term asymptotics of the n-th positive eigenvalue for constant V (alpha = pi).
 *
 * 1/S >= 1: (2n+1) pi - 4/((2n+1) pi / S);  1/S < 0: (2n-1) pi + 4/((2n-1) pi |1/S|);
 * S = 0: the exact lattice (2n-1) pi.
 */
inline double eigenvalue_asymptotic(cplx V, int n) {
  if (n < 1) throw InputError("eigenvalue_asymptotic: n >= 1");
  const double S = spectral_characteristic(V).S;
  if (std::abs(S) <= 1e-12) return (2 * n - 1) * pi;
  const double s = 1.0 / S;
  if (s > 0.0) {
    const double a = (2 * n + 1) * pi;
    return a - 4.0 / (a * s);
  }
  const double a = (2 * n - 1) * pi;
  return a + 4.0 / (a * std::abs(s));
}

/// Abscissas xi in [lo, hi] where F(xi) = 1/S(V): the graphical solution of the constant-potential equation.
inline std::vector<double> figure_intersections(cplx V, double lo, double hi) {
  const auto sc = spectral_characteristic(V);
  if (std::abs(sc.S) <= 1e-12) return {};  // the line 1/S is at infinity: only the poles
  const double s = 1.0 / sc.S;
  const auto f = [s](double xi) { return F(xi) - s; };
  std::vector<Bracket> br;
  double a = lo;
  const double first = 2.0 + 4.0 * std::floor((lo - 2.0) / 4.0);
  for (double pole = first; a < hi; pole += 4.0) {
    if (pole <= a) continue;
    const double b = std::min(pole - 1e-9, hi);
    if (a < b)
      for (const auto& sb : subdivide(a, b, 8)) br.push_back(sb);
    a = pole + 1e-9;
  }
  std::vector<double> out;
  for (const auto& r : find_real_roots_detailed(f, br, 1e-12)) out.push_back(sc.resonant && std::abs(r.x) < 1e-6 ? 0.0 : r.x);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ================================================================== two potentials

/**
 * 3x3 system for A(v1, v2, alpha) in the unknowns C, P1 = psi(0) - (i/2)<psi, v1>,
 * P2 = psi(1) + (i/2)<psi, v2>, where psi = C e^{-i lambda x} + i P1 u1 + i P2 u2
 * and u_k(x) = int_0^x e^{-i lambda (x-y)} v_k(y) dy.
 */
inline Eigen::Matrix3cd bvp_matrix(double lambda, const Potential& v1, const Potential& v2, BoundaryPhase alpha,
                                   const QuadratureSpec& q = {}) {
  const cplx t1 = tilde_v(v1, lambda, q), t2 = tilde_v(v2, lambda, q);
  const cplx h11 = cross_hat(v1, v1, lambda, q), h12 = cross_hat(v1, v2, lambda, q);
  const cplx h21 = cross_hat(v2, v1, lambda, q), h22 = cross_hat(v2, v2, lambda, q);
  const cplx e = alpha.unit(), em = std::exp(-I * lambda);
  Eigen::Matrix3cd m;
  m << -1.0 + 0.5 * I * std::conj(t1), 1.0 - 0.5 * h11, -0.5 * h21,  //
      -em - 0.5 * I * std::conj(t2), -I * em * t1 + 0.5 * h12, 1.0 - I * em * t2 + 0.5 * h22,  //
      em + I * std::conj(t2) - e + I * e * std::conj(t1), I * em * t1 - h12 - e * h11, I * em * t2 - h22 - e * h21;
  return m;
}

/// Eigenfunction from the null vector of the 3x3 system.
inline Sampler bvp_eigenfunction(double lambda, const Potential& v1, const Potential& v2, BoundaryPhase alpha) {
  Eigen::JacobiSVD<Eigen::Matrix3cd> svd(bvp_matrix(lambda, v1, v2, alpha), Eigen::ComputeFullV);
  const Eigen::Vector3cd n = svd.matrixV().col(2);
  auto p1 = std::make_shared<Potential>(v1), p2 = std::make_shared<Potential>(v2);
  Sampler raw = [=](double x) {
    return n(0) * std::exp(-I * lambda * x) + I * n(1) * shifted_moment(*p1, lambda, x, 0.0, x) +
           I * n(2) * shifted_moment(*p2, lambda, x, 0.0, x);
  };
  return detail::orthonormalize({raw}).front();
}

/// Gauss-Newton on det(bvp_matrix) along the real axis.
inline double refine_bvp_root(double lambda, const Potential& v1, const Potential& v2, BoundaryPhase alpha) {
  auto det = [&](double l) { return bvp_matrix(l, v1, v2, alpha).determinant(); };
  for (int it = 0; it < 60; ++it) {
    const cplx d = det(lambda);
    const double h = 1e-6 * std::max(1.0, std::abs(lambda));
    const cplx dd = (det(lambda + h) - det(lambda - h)) / (2.0 * h);
    if (std::norm(dd) == 0.0) break;
    const double step = -std::real(std::conj(dd) * d) / std::norm(dd);
    lambda += std::clamp(step, -0.5, 0.5);
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(lambda))) break;
  }
  return lambda;
}

namespace detail {

/// The two-potential operator reduces to one potential iff v1 = 0 or v2 = r e^{-i alpha} v1 with r real.
inline bool k_correction_vanishes(const Potential& v1, const Potential& v2, BoundaryPhase alpha) {
  if (v1.is_zero() || v2.is_zero()) return true;
  const double n1 = std::norm(l2_norm(v1));
  const cplx r = inner_product(v2, v1.scaled(std::conj(alpha.unit()))) / n1;
  if (std::abs(r.imag()) > 1e-12 * std::abs(r)) return false;
  return combine(v2, v1.scaled(r.real()), BoundaryPhase(pi - alpha.value())).is_zero();
}

}  // namespace detail

/**
 * Eigenvalues of A(v1, v2, alpha) on the interval.
 *
 * When v2 = r e^{-i alpha} v1 (r real, including 0) the operator coincides with the single-potential
 * operator for v = v1 + e^{i alpha} v2, and roots of its characteristic
 * function are authoritative. Otherwise discretization eigenvalues seed a
 * Newton refinement on the exact 3x3 system; the single-potential
 * characteristic function of the combined v is attached as a diagnostic.
 */
inline std::vector<EigenResult> eigenvalues_general(const Potential& v1, const Potential& v2, BoundaryPhase alpha,
                                                    double lo, double hi, int oracle_cells = 1024) {
  require_domain(v1, Domain::interval, "eigenvalues_general");
  require_domain(v2, Domain::interval, "eigenvalues_general");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw InputError("eigenvalues_general: finite lo < hi");
  std::vector<EigenResult> out;
  if (v1.is_zero() && v2.is_zero()) {
    for (double l : free_spectrum_interval(alpha, lo, hi))
      out.push_back({l, 1, {[l](double x) { return free_mode(l, x); }}, 0.0, 0.0, "free", {}});
    return out;
  }
  const Potential v = combine(v1, v2, alpha);
  const bool reducible = detail::k_correction_vanishes(v1, v2, alpha);
  if (reducible) {
    if (v.is_zero()) return eigenvalues_general(Potential::zero(), Potential::zero(), alpha, lo, hi);
    if (v.is_unit_constant() && std::abs(alpha.unit() + 1.0) < 1e-14) return eigenvalues_const(v.constant_value(), lo, hi);
    const auto f = [&](double l) { return chi_real(l, v, alpha); };
    const int parts = std::max(8, int(std::ceil((hi - lo) / (pi / 16.0))));
    for (const auto& r : find_real_roots_detailed(f, subdivide(lo, hi, parts), 1e-12))
      out.push_back(detail::chi_eigen_result(r.x, v, alpha, r.tangent ? 2 : 1, "chi"));
    return out;
  }
  const auto d = discretize_interval(v1, v2, alpha, oracle_cells);
  for (double seed : oracle_eigenvalues(d, lo - 0.5, hi + 0.5)) {
    const double l = refine_bvp_root(seed, v1, v2, alpha);
    if (l < lo || l > hi) continue;
    if (!out.empty() && std::abs(out.back().lambda - l) < 1e-8) continue;
    EigenResult r;
    r.lambda = l;
    r.eigenfunctions = {bvp_eigenfunction(l, v1, v2, alpha)};
    r.defect1 = detail::relative_smallest_singular(bvp_matrix(l, v1, v2, alpha));
    r.defect2 = detail::interval_eigen_residual(l, v1, v2, alpha, r.eigenfunctions.front());
    r.method = "oracle+bvp";
    r.chi_combined = chi_general(l, v, alpha).chi;
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return out;
}

}  // namespace momentum

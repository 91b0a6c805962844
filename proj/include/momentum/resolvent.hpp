#pragma once
/**
 * @file resolvent.hpp
 * @brief Gamma matrices and rank-two resolvent kernels of the perturbed momentum operators.
 *
 * Three operators are covered: the single-potential axis operator (two
 * independent constructions A and B), the two-potential axis operator, and the
 * two-potential interval operator (plus its single-potential F form).
 */

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greens.hpp"
#include "numerics.hpp"
#include "potentials.hpp"

namespace momentum {

enum class GammaVariant { axis_single_A, axis_single_B, axis_two, interval_two, interval_single_F };

inline const char* to_string(GammaVariant v) {
  switch (v) {
    case GammaVariant::axis_single_A: return "axis-single-A";
    case GammaVariant::axis_single_B: return "axis-single-B";
    case GammaVariant::axis_two: return "axis-two";
    case GammaVariant::interval_two: return "interval-two";
    case GammaVariant::interval_single_F: return "interval-single-F";
  }
  return "?";
}

struct GammaMatrix {
  GammaVariant variant;
  Eigen::Matrix2cd m;  ///< m(j-1, k-1) = gamma_jk
  cplx det;

  cplx operator()(int j, int k) const { return m(j - 1, k - 1); }
  double det_consistency() const {
    return std::abs(det - (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0))) / std::max(std::abs(det), 1e-300);
  }
};

inline GammaMatrix make_gamma(GammaVariant v, cplx g11, cplx g12, cplx g21, cplx g22) {
  GammaMatrix g{v, {}, 0.0};
  g.m << g11, g12, g21, g22;
  g.det = g11 * g22 - g12 * g21;
  return g;
}

using PointFn = std::function<cplx(Point)>;

/// Panel density adapted to the decay length 1/|Im z| of the kernels.
inline QuadratureSpec adapted(const QuadratureSpec& q, cplx z) {
  QuadratureSpec r = q;
  r.panels = std::max(q.panels, int(std::ceil(2.0 * std::abs(z))));
  return r;
}

/// <F, v> for a function of a Point; 0 and `kinks` (non-smooth points of F) are panel boundaries.
inline cplx inner_fn(const PointFn& f, const Potential& v, const QuadratureSpec& q, std::vector<double> kinks = {}) {
  kinks.push_back(0.0);
  return inner_product([&](double x) { return f(Point(x)); }, v, q, kinks);
}

/**
 * Kernel of the form  base(x, y) + sum_jk left_j(x) coeff_jk conj(right_k(y)).
 *
 * `right` functions are already evaluated at conj(z). The potentials of the
 * operator are kept for residual checks.
 */
struct KernelModel {
  enum class Base { free_axis, point_axis, interval };

  GammaVariant variant;
  Base base;
  SpectralPoint zp;
  BoundaryPhase alpha;
  Domain domain;
  GammaMatrix gamma;
  std::vector<PointFn> left;
  std::vector<PointFn> right;
  Eigen::MatrixXcd coeff;
  std::shared_ptr<const Potential> v1;
  std::shared_ptr<const Potential> v2;
  QuadratureSpec quad;

  cplx base_kernel(Point x, Point y) const {
    switch (base) {
      case Base::free_axis: return g_axis(zp, difference(x, y));
      case Base::point_axis: return G_point(zp, x, y, alpha);
      case Base::interval: return g_interval(zp.z(), x.x, y.x, alpha);
    }
    return 0.0;
  }

  /// int base(x, y) h(y) dy in closed form for closed-form h.
  cplx base_apply(const Potential& h, Point x) const {
    switch (base) {
      case Base::free_axis: return free_convolution(h, zp, x.x, quad);
      case Base::point_axis: return point_convolution(h, zp, x, alpha, quad);
      case Base::interval: return interval_convolution(h, zp.z(), x.x, alpha, quad);
    }
    return 0.0;
  }

  cplx perturbation(Point x, Point y) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < left.size(); ++j) {
      const cplx lj = left[j](x);
      if (lj == 0.0) continue;
      for (std::size_t k = 0; k < right.size(); ++k) s += lj * coeff(j, k) * std::conj(right[k](y));
    }
    return s;
  }

  cplx operator()(Point x, Point y) const { return base_kernel(x, y) + perturbation(x, y); }

  std::size_t rank_terms() const { return left.size(); }
};

// ------------------------------------------------------------------ axis

namespace detail {

struct AxisFns {
  SpectralPoint zp;
  BoundaryPhase alpha;
  QuadratureSpec q;

  PointFn e0() const {
    const auto z = zp;
    const cplx w = w_axis(zp, alpha);
    return [z, w](Point x) { return g_axis(z, x) * w; };
  }
  PointFn ev(const std::shared_ptr<const Potential>& v) const {
    const auto z = zp;
    const auto a = alpha;
    const auto qq = q;
    return [z, a, qq, v](Point x) { return point_convolution(*v, z, x, a, qq); };
  }
  /// <v, E0(., conj z)> = E_v(-0; z)
  cplx v_e0(const Potential& v) const { return point_convolution(v, zp, minus0(), alpha, q); }
  /// <E0(., z), v> = conj(E_v(-0; conj z))
  cplx e0_v(const Potential& v) const { return std::conj(point_convolution(v, zp.conj(), minus0(), alpha, q)); }
};

inline void require_axis(const Potential& v) { require_domain(v, Domain::axis, "axis operator"); }
inline void require_interval(const Potential& v) { require_domain(v, Domain::interval, "interval operator"); }

}  // namespace detail

/// Gamma matrix of the single-potential axis operator, variant A (on G) or B (on g_z).
inline GammaMatrix gamma_axis_single(const SpectralPoint& zp, const Potential& v, BoundaryPhase alpha,
                                     GammaVariant variant = GammaVariant::axis_single_A,
                                     const QuadratureSpec& q0 = {}) {
  detail::require_axis(v);
  const auto q = adapted(q0, zp.z());
  const double s = zp.sign();
  const cplx e = alpha.unit();
  if (variant == GammaVariant::axis_single_A) {
    const detail::AxisFns fns{zp, alpha, q};
    const auto vp = std::make_shared<const Potential>(v);
    const cplx e2v = inner_fn(fns.ev(vp), v, q, v.breakpoints());
    return make_gamma(variant, -e2v, 1.0 + fns.v_e0(v), 1.0 + fns.e0_v(v), -0.5 * I * s);
  }
  if (variant != GammaVariant::axis_single_B) throw InputError("gamma_axis_single: variant must be A or B");
  if (std::abs(1.0 + e) < 1e-10) throw VariantUnavailable("variant B needs alpha != pi; use variant A");
  const auto e2 = [&](Point x) { return free_convolution(v, zp, x.x, q); };
  const cplx e2v = inner_fn(e2, v, q, v.breakpoints());
  const cplx v_gbar = free_convolution(v, zp, 0.0, q);                // <v, g_{conj z}>
  const cplx g_v = std::conj(free_convolution(v, zp.conj(), 0.0, q));  // <g_z, v>
  const double tp = zp.upper() ? 1.0 : 0.0, tm = 1.0 - tp;
  const cplx g11 = e2v - 2.0 * I * (1.0 - e) / (1.0 + e);
  const cplx g12 = -2.0 / (1.0 + std::conj(e)) - v_gbar;
  const cplx g21 = -2.0 / (1.0 + e) - g_v;
  const cplx g22 = I / (1.0 + std::conj(e)) * (tp - std::conj(e) * tm);
  return make_gamma(variant, g11, g12, g21, g22);
}

inline KernelModel kernel_axis_single(const SpectralPoint& zp, const Potential& v, BoundaryPhase alpha,
                                      GammaVariant variant = GammaVariant::axis_single_A,
                                      const QuadratureSpec& q0 = {}) {
  const auto q = adapted(q0, zp.z());
  const auto vp = std::make_shared<const Potential>(v);
  const auto zero = std::make_shared<const Potential>(Potential::zero(Domain::axis));
  const GammaMatrix g = gamma_axis_single(zp, v, alpha, variant, q0);
  KernelModel k{variant, KernelModel::Base::point_axis, zp, alpha, Domain::axis, g, {}, {}, {}, vp, zero, q};
  if (variant == GammaVariant::axis_single_A) {
    const detail::AxisFns at{zp, alpha, q}, bar{zp.conj(), alpha, q};
    k.left = {at.e0(), at.ev(vp)};
    k.right = {bar.e0(), bar.ev(vp)};
    k.coeff = g.m / g.det;
  } else {
    k.base = KernelModel::Base::free_axis;
    const auto z = zp, zb = zp.conj();
    k.left = {[z](Point x) { return g_axis(z, x); }, [z, vp, q](Point x) { return free_convolution(*vp, z, x.x, q); }};
    k.right = {[zb](Point x) { return g_axis(zb, x); },
               [zb, vp, q](Point x) { return free_convolution(*vp, zb, x.x, q); }};
    k.coeff = -g.m / g.det;
  }
  return k;
}

/// Gamma matrix of the two-potential axis operator.
inline GammaMatrix gamma_axis_two(const SpectralPoint& zp, const Potential& v1, const Potential& v2,
                                  BoundaryPhase alpha, const QuadratureSpec& q0 = {}) {
  detail::require_axis(v1);
  detail::require_axis(v2);
  const auto q = adapted(q0, zp.z());
  const detail::AxisFns fns{zp, alpha, q};
  const auto p1 = std::make_shared<const Potential>(v1), p2 = std::make_shared<const Potential>(v2);
  const auto E1 = fns.ev(p1), E2 = fns.ev(p2);
  const cplx e = alpha.unit(), ec = std::conj(e);
  const double s = zp.sign(), tp = zp.upper() ? 1.0 : 0.0, tm = 1.0 - tp;
  const cplx vE0_1 = fns.v_e0(v1), vE0_2 = fns.v_e0(v2);
  const cplx E0v_1 = fns.e0_v(v1), E0v_2 = fns.e0_v(v2);
  // E_k has kinks at the breakpoints of v_k.
  const auto b1 = v1.breakpoints(), b2 = v2.breakpoints();
  const cplx E11 = inner_fn(E1, v1, q, b1), E12 = inner_fn(E1, v2, q, b1);
  const cplx E21 = inner_fn(E2, v1, q, b2), E22 = inner_fn(E2, v2, q, b2);
  const cplx g11 = 2.0 * I * (s + e * vE0_2 - ec * E0v_2 - 0.5 * I * E22);
  const cplx g12 = 2.0 * I * (2.0 * ec * tp + vE0_2 + ec * E0v_1 + 0.5 * I * E21);
  const cplx g21 = -2.0 * I * (2.0 * e * tm + e * vE0_1 + E0v_2 - 0.5 * I * E12);
  const cplx g22 = -2.0 * I * (-s + vE0_1 - E0v_1 + 0.5 * I * E11);
  return make_gamma(GammaVariant::axis_two, g11, g12, g21, g22);
}

/// Combination rows L with  calE_j = sum_a L(j, a) E_a  over the basis (E0, E1, E2).
inline Eigen::Matrix<cplx, 2, 3> expansion_rows(GammaVariant v, BoundaryPhase alpha) {
  const cplx e = alpha.unit();
  Eigen::Matrix<cplx, 2, 3> l;
  if (v == GammaVariant::axis_two)
    l << 2.0 * I, 1.0, 0.0, -2.0 * I * std::conj(e), 0.0, 1.0;
  else if (v == GammaVariant::interval_two)
    l << -2.0 * I * e, 1.0, 0.0, 2.0 * I, 0.0, 1.0;
  else
    throw InputError("expansion rows exist only for the two-potential variants");
  return l;
}

/**
 * 3x3 coefficient matrix over (E0, E1, E2): c = L^T Gamma conj(L).
 *
 * The kernel is base - (1/gamma) sum_ab E_a c_ab conj(E_b(., conj z)).
 */
inline Eigen::Matrix3cd c_matrix(const GammaMatrix& g, BoundaryPhase alpha) {
  const auto l = expansion_rows(g.variant, alpha);
  return l.transpose() * g.m * l.conjugate();
}

/// The interval c-matrix exactly as tabulated entry by entry (Remark k4 form).
inline Eigen::Matrix3cd c_matrix_interval_tabulated(const GammaMatrix& g, BoundaryPhase alpha) {
  const cplx e = alpha.unit(), ec = std::conj(e);
  const cplx g11 = g(1, 1), g12 = g(1, 2), g21 = g(2, 1), g22 = g(2, 2);
  Eigen::Matrix3cd c;
  c << 4.0 * g11 - 4.0 * e * g12 - 4.0 * ec * g21 + 4.0 * g22, -2.0 * I * e * g11 + 2.0 * I * g21,
      -2.0 * I * e * g12 + 2.0 * I * g22,  //
      2.0 * I * ec * g11 - 2.0 * I * g12, g11, g12,  //
      2.0 * I * ec * g21 - 2.0 * I * g22, g21, g22;
  return c;
}

/// Coefficients (a, b) with col0 = a col1 + b col2 for the two-potential c-matrices.
inline std::pair<cplx, cplx> c_matrix_column_relation(GammaVariant v, BoundaryPhase alpha) {
  const cplx e = alpha.unit();
  if (v == GammaVariant::axis_two) return {-2.0 * I, 2.0 * I * e};
  if (v == GammaVariant::interval_two) return {2.0 * I * std::conj(e), -2.0 * I};
  throw InputError("column relation exists only for the two-potential variants");
}

inline double c_matrix_column_defect(const Eigen::Matrix3cd& c, GammaVariant v, BoundaryPhase alpha) {
  const auto [a, b] = c_matrix_column_relation(v, alpha);
  return (c.col(0) - a * c.col(1) - b * c.col(2)).cwiseAbs().maxCoeff();
}

inline KernelModel kernel_axis_two(const SpectralPoint& zp, const Potential& v1, const Potential& v2,
                                   BoundaryPhase alpha, const QuadratureSpec& q0 = {}) {
  const auto q = adapted(q0, zp.z());
  const auto p1 = std::make_shared<const Potential>(v1), p2 = std::make_shared<const Potential>(v2);
  const GammaMatrix g = gamma_axis_two(zp, v1, v2, alpha, q0);
  KernelModel k{GammaVariant::axis_two, KernelModel::Base::point_axis, zp, alpha, Domain::axis, g, {}, {}, {},
                p1, p2, q};
  const cplx ec = std::conj(alpha.unit());
  auto cal = [&](const SpectralPoint& w) -> std::vector<PointFn> {
    const detail::AxisFns f{w, alpha, q};
    const auto E0 = f.e0(), E1 = f.ev(p1), E2 = f.ev(p2);
    return {[E0, E1](Point x) { return E1(x) + 2.0 * I * E0(x); },
            [E0, E2, ec](Point x) { return E2(x) - 2.0 * I * ec * E0(x); }};
  };
  k.left = cal(zp);
  k.right = cal(zp.conj());
  k.coeff = -g.m / g.det;
  return k;
}

/// Same operator written over (E0, E1, E2) with the 3x3 c-matrix.
inline KernelModel kernel_axis_two_expanded(const SpectralPoint& zp, const Potential& v1, const Potential& v2,
                                            BoundaryPhase alpha, const QuadratureSpec& q0 = {}) {
  KernelModel k = kernel_axis_two(zp, v1, v2, alpha, q0);
  const detail::AxisFns at{zp, alpha, k.quad}, bar{zp.conj(), alpha, k.quad};
  k.left = {at.e0(), at.ev(k.v1), at.ev(k.v2)};
  k.right = {bar.e0(), bar.ev(k.v1), bar.ev(k.v2)};
  k.coeff = -c_matrix(k.gamma, alpha) / k.gamma.det;
  return k;
}

// ------------------------------------------------------------------ interval

namespace detail {

struct IntervalFns {
  SpectralPoint zp;
  BoundaryPhase alpha;
  QuadratureSpec q;

  PointFn e0() const {
    const cplx z = zp.z();
    const auto a = alpha;
    return [z, a](Point x) { return g_interval(z, x.x, 1.0, a); };
  }
  PointFn ev(const std::shared_ptr<const Potential>& v) const {
    const cplx z = zp.z();
    const auto a = alpha;
    const auto qq = q;
    return [z, a, qq, v](Point x) { return interval_convolution(*v, z, x.x, a, qq); };
  }
  /// <v, E0(., conj z)> = E_v(1; z)
  cplx v_e0(const Potential& v) const { return interval_convolution(v, zp.z(), 1.0, alpha, q); }
  /// <E0(., z), v> = conj(E_v(1; conj z))
  cplx e0_v(const Potential& v) const { return std::conj(interval_convolution(v, std::conj(zp.z()), 1.0, alpha, q)); }
};

}  // namespace detail

inline GammaMatrix gamma_interval(const SpectralPoint& zp, const Potential& v1, const Potential& v2,
                                  BoundaryPhase alpha, const QuadratureSpec& q0 = {}) {
  detail::require_interval(v1);
  detail::require_interval(v2);
  detail::check_interval_pole(zp.z(), alpha);
  const auto q = adapted(q0, zp.z());
  const detail::IntervalFns fns{zp, alpha, q};
  const auto p1 = std::make_shared<const Potential>(v1), p2 = std::make_shared<const Potential>(v2);
  const auto E1 = fns.ev(p1), E2 = fns.ev(p2);
  const cplx z = zp.z(), e = alpha.unit(), ec = std::conj(e);
  const cplx b = beta_interval(z, alpha), eb = eiz_beta_interval(z, alpha);
  const cplx vE0_1 = fns.v_e0(v1), vE0_2 = fns.v_e0(v2);
  const cplx E0v_1 = fns.e0_v(v1), E0v_2 = fns.e0_v(v2);
  // E_k has kinks at the breakpoints of v_k.
  const auto b1 = v1.breakpoints(), b2 = v2.breakpoints();
  const cplx E11 = inner_fn(E1, v1, q, b1), E12 = inner_fn(E1, v2, q, b1);
  const cplx E21 = inner_fn(E2, v1, q, b2), E22 = inner_fn(E2, v2, q, b2);
  const cplx g11 = -2.0 * I * (1.0 + 2.0 * I * b - E0v_2 + vE0_2 + 0.5 * I * E22);
  const cplx g12 = -2.0 * I * (2.0 * I * eb + E0v_1 + ec * vE0_2 - 0.5 * I * E21);
  const cplx g21 = 2.0 * I * (-2.0 * I * e * b + e * E0v_2 + vE0_1 + 0.5 * I * E12);
  const cplx g22 = 2.0 * I * (1.0 - 2.0 * I * e * eb - e * E0v_1 + ec * vE0_1 - 0.5 * I * E11);
  return make_gamma(GammaVariant::interval_two, g11, g12, g21, g22);
}

inline KernelModel kernel_interval(const SpectralPoint& zp, const Potential& v1, const Potential& v2,
                                   BoundaryPhase alpha, const QuadratureSpec& q0 = {}) {
  const auto q = adapted(q0, zp.z());
  const auto p1 = std::make_shared<const Potential>(v1), p2 = std::make_shared<const Potential>(v2);
  const GammaMatrix g = gamma_interval(zp, v1, v2, alpha, q0);
  KernelModel k{GammaVariant::interval_two, KernelModel::Base::interval, zp, alpha, Domain::interval, g, {}, {}, {},
                p1, p2, q};
  const cplx e = alpha.unit();
  auto cal = [&](const SpectralPoint& w) -> std::vector<PointFn> {
    const detail::IntervalFns f{w, alpha, q};
    const auto E0 = f.e0(), E1 = f.ev(p1), E2 = f.ev(p2);
    return {[E0, E1, e](Point x) { return E1(x) - 2.0 * I * e * E0(x); },
            [E0, E2](Point x) { return E2(x) + 2.0 * I * E0(x); }};
  };
  k.left = cal(zp);
  k.right = cal(zp.conj());
  k.coeff = -g.m / g.det;
  return k;
}

inline KernelModel kernel_interval_expanded(const SpectralPoint& zp, const Potential& v1, const Potential& v2,
                                            BoundaryPhase alpha, const QuadratureSpec& q0 = {}) {
  KernelModel k = kernel_interval(zp, v1, v2, alpha, q0);
  const detail::IntervalFns at{zp, alpha, k.quad}, bar{zp.conj(), alpha, k.quad};
  k.left = {at.e0(), at.ev(k.v1), at.ev(k.v2)};
  k.right = {bar.e0(), bar.ev(k.v1), bar.ev(k.v2)};
  k.coeff = -c_matrix(k.gamma, alpha) / k.gamma.det;
  return k;
}

/// Single-potential interval operator A(v, alpha) through the 2x2 F matrix.
inline GammaMatrix gamma_interval_single(const SpectralPoint& zp, const Potential& v, BoundaryPhase alpha,
                                         const QuadratureSpec& q0 = {}) {
  detail::require_interval(v);
  detail::check_interval_pole(zp.z(), alpha);
  const auto q = adapted(q0, zp.z());
  const detail::IntervalFns fns{zp, alpha, q};
  const auto vp = std::make_shared<const Potential>(v);
  const cplx z = zp.z(), e = alpha.unit();
  const cplx f11 = inner_fn(fns.ev(vp), v, q, v.breakpoints());
  const cplx f12 = -(e + fns.v_e0(v));
  const cplx f21 = -(std::conj(e) + fns.e0_v(v));
  cplx f22;
  if (z.imag() >= 0.0) {
    const cplx t = e * std::exp(I * z);
    f22 = 0.5 * I * (1.0 + t) / (1.0 - t);
  } else {
    const cplx m = std::exp(-I * z);
    f22 = 0.5 * I * (m + e) / (m - e);
  }
  return make_gamma(GammaVariant::interval_single_F, f11, f12, f21, f22);
}

inline KernelModel kernel_interval_single(const SpectralPoint& zp, const Potential& v, BoundaryPhase alpha,
                                          const QuadratureSpec& q0 = {}) {
  const auto q = adapted(q0, zp.z());
  const auto vp = std::make_shared<const Potential>(v);
  const auto zero = std::make_shared<const Potential>(Potential::zero(Domain::interval));
  const GammaMatrix g = gamma_interval_single(zp, v, alpha, q0);
  KernelModel k{GammaVariant::interval_single_F, KernelModel::Base::interval, zp, alpha, Domain::interval, g, {},
                {}, {}, vp, zero, q};
  const detail::IntervalFns at{zp, alpha, q}, bar{zp.conj(), alpha, q};
  k.left = {at.e0(), at.ev(vp)};
  k.right = {bar.e0(), bar.ev(vp)};
  k.coeff = -g.m / g.det;
  return k;
}

/// Rebuilds the kernel of the same operator at conj(z).
inline KernelModel conjugate_kernel(const KernelModel& k) {
  const auto zb = k.zp.conj();
  switch (k.variant) {
    case GammaVariant::axis_single_A:
    case GammaVariant::axis_single_B: return kernel_axis_single(zb, *k.v1, k.alpha, k.variant, k.quad);
    case GammaVariant::axis_two: return kernel_axis_two(zb, *k.v1, *k.v2, k.alpha, k.quad);
    case GammaVariant::interval_two: return kernel_interval(zb, *k.v1, *k.v2, k.alpha, k.quad);
    case GammaVariant::interval_single_F: return kernel_interval_single(zb, *k.v1, k.alpha, k.quad);
  }
  throw InputError("unknown variant");
}

// ------------------------------------------------------------------ application

/// Boundary functionals of a solution; fields not defined for a variant stay empty.
struct SolverIntermediates {
  std::optional<cplx> psi1, psi2, psi_s, psi_g, w;

  double max_difference(const SolverIntermediates& o) const {
    double d = 0.0;
    auto cmp = [&](const std::optional<cplx>& a, const std::optional<cplx>& b) {
      if (a && b) d = std::max(d, std::abs(*a - *b));
    };
    cmp(psi1, o.psi1);
    cmp(psi2, o.psi2);
    cmp(psi_s, o.psi_s);
    cmp(psi_g, o.psi_g);
    cmp(w, o.w);
    return d;
  }
};

struct ResolventSolution {
  PointFn psi;                       ///< x -> (R_z h)(x)
  std::vector<double> grid;
  std::vector<cplx> values;
  SolverIntermediates from_psi;      ///< recomputed from psi
  SolverIntermediates from_system;   ///< solution of the 2x2 boundary system
};

namespace detail {

struct Boundary {
  cplx left, right;  // psi(-0), psi(+0) on the axis; psi(0), psi(1) on the interval
};

inline Boundary boundary_values(const KernelModel& k, const PointFn& psi) {
  if (k.domain == Domain::axis) return {psi(minus0()), psi(plus0())};
  return {psi(Point(0.0)), psi(Point(1.0))};
}

inline std::vector<double> domain_breaks(const KernelModel& k, const Potential* h) {
  std::vector<double> b{0.0};
  if (k.domain == Domain::interval) b.push_back(1.0);
  for (const Potential* p : {k.v1.get(), k.v2.get(), h})
    if (p) {
      auto pb = p->breakpoints();
      b.insert(b.end(), pb.begin(), pb.end());
    }
  return b;
}

}  // namespace detail

inline SolverIntermediates intermediates_from_psi(const KernelModel& k, const PointFn& psi,
                                                  const Potential* h = nullptr) {
  const auto bv = detail::boundary_values(k, psi);
  const cplx e = k.alpha.unit(), ec = std::conj(e);
  const auto kinks = detail::domain_breaks(k, h);
  const cplx p1 = inner_fn(psi, *k.v1, k.quad, kinks), p2 = inner_fn(psi, *k.v2, k.quad, kinks);
  SolverIntermediates s;
  switch (k.variant) {
    case GammaVariant::axis_single_A:
    case GammaVariant::axis_single_B:
      s.psi_s = 0.5 * (bv.left + ec * bv.right);
      s.psi_g = I * (bv.left - bv.right);
      s.w = p1;
      break;
    case GammaVariant::axis_two:
      s.psi1 = bv.left + 0.5 * I * p1;
      s.psi2 = bv.right - 0.5 * I * p2;
      break;
    case GammaVariant::interval_two:
      s.psi1 = bv.left - 0.5 * I * p1;
      s.psi2 = bv.right + 0.5 * I * p2;
      s.w = p2 + e * p1;
      break;
    case GammaVariant::interval_single_F:
      s.psi_s = 0.5 * (bv.left + ec * bv.right);
      s.w = e * p1;
      break;
  }
  return s;
}

/// Solves the variant's 2x2 boundary system for right-hand side h.
inline SolverIntermediates intermediates_from_system(const KernelModel& k, const Potential& h) {
  // <h, f> = int h conj(f) over the support of h.
  std::vector<cplx> rhs;
  for (const auto& r : k.right) {
    const auto f = [&](double y) { return std::conj(r(Point(y))); };
    auto [lo, hi] = h.support();
    auto bp = detail::domain_breaks(k, &h);
    rhs.push_back(h.is_zero() ? cplx(0.0)
                              : integrate_density([&](double y) { return h(y) * f(y); }, lo, hi, double(k.quad.panels),
                                                  k.quad, bp));
  }
  const auto& g = k.gamma;
  Eigen::Matrix2cd m;
  SolverIntermediates s;
  Eigen::Vector2cd b(rhs[0], rhs[1]);
  if (k.variant == GammaVariant::axis_single_A) {
    m << -g(2, 2), g(1, 2), g(2, 1), -g(1, 1);
    const Eigen::VectorXcd x = solve_small(m, b);
    s.w = x(0);
    s.psi_s = x(1);
    return s;
  }
  m << g(2, 2), -g(1, 2), -g(2, 1), g(1, 1);
  const Eigen::VectorXcd x = solve_small(m, b);
  switch (k.variant) {
    case GammaVariant::axis_single_B:
      s.psi_g = x(0);
      s.psi_s = x(1);
      break;
    case GammaVariant::axis_two:
    case GammaVariant::interval_two:
      s.psi1 = x(0);
      s.psi2 = x(1);
      break;
    case GammaVariant::interval_single_F:
      s.w = x(0);
      s.psi_s = x(1);
      break;
    default: break;
  }
  return s;
}

/**
 * psi = R_z h for a closed-form or sampled right-hand side h.
 *
 * The base part is evaluated in closed form; the rank terms need the
 * functionals <h, right_k>, integrated once.
 */
inline ResolventSolution apply_resolvent(const KernelModel& k, const Potential& h, const std::vector<double>& grid = {}) {
  require_domain(h, k.domain, "apply_resolvent");
  std::vector<cplx> hk;
  auto [lo, hi] = h.support();
  const auto bp = detail::domain_breaks(k, &h);
  for (const auto& r : k.right) {
    if (h.is_zero()) {
      hk.push_back(0.0);
      continue;
    }
    hk.push_back(integrate_density([&](double y) { return h(y) * std::conj(r(Point(y))); }, lo, hi,
                                   double(k.quad.panels), k.quad, bp));
  }
  Eigen::VectorXcd a = k.coeff * Eigen::Map<Eigen::VectorXcd>(hk.data(), Eigen::Index(hk.size()));
  const auto hp = std::make_shared<const Potential>(h);
  const auto left = k.left;
  const KernelModel kc = k;
  ResolventSolution sol;
  sol.psi = [kc, hp, left, a](Point x) {
    cplx s = kc.base_apply(*hp, x);
    for (std::size_t j = 0; j < left.size(); ++j) s += left[j](x) * a(Eigen::Index(j));
    return s;
  };
  sol.grid = grid;
  for (double x : grid) sol.values.push_back(sol.psi(Point(x)));
  sol.from_psi = intermediates_from_psi(k, sol.psi, &h);
  sol.from_system = h.is_zero() ? sol.from_psi : intermediates_from_system(k, h);
  return sol;
}

/// psi(x) = int K(x, y) f(y) dy by direct quadrature (for non-closed-form f).
inline cplx apply_kernel_numeric(const KernelModel& k, const std::function<cplx(double)>& f, Point x, double lo,
                                 double hi, std::vector<double> breaks = {}) {
  breaks.push_back(x.x);
  auto extra = detail::domain_breaks(k, nullptr);
  breaks.insert(breaks.end(), extra.begin(), extra.end());
  return integrate_density([&](double y) { return k(x, Point(y)) * f(y); }, lo, hi, double(k.quad.panels), k.quad,
                           breaks);
}

// ------------------------------------------------------------------ residuals

struct ResidualReport {
  double ode_max = 0.0;  ///< max |(A - z) psi - h| on the sample grid
  double bc = 0.0;       ///< |boundary condition defect|
};

/// Sixth-order central derivative.
inline cplx derivative(const PointFn& f, double x, double h) {
  return (-f(x - 3 * h) + 9.0 * f(x - 2 * h) - 45.0 * f(x - h) + 45.0 * f(x + h) - 9.0 * f(x + 2 * h) +
          f(x + 3 * h)) /
         (60.0 * h);
}

/**
 * Residual of (A - z) psi = h and of the domain's boundary condition.
 *
 * Grid points within 3*step of a non-smooth point are skipped.
 */
inline ResidualReport check_resolvent_solution(const KernelModel& k, const PointFn& psi, const Potential& h,
                                               const std::vector<double>& grid, double step = 1e-3) {
  const auto bv = detail::boundary_values(k, psi);
  const cplx e = k.alpha.unit(), ec = std::conj(e);
  const Potential &v1 = *k.v1, &v2 = *k.v2;
  const auto kinks = detail::domain_breaks(k, &h);
  const cplx p1 = inner_fn(psi, v1, k.quad, kinks), p2 = inner_fn(psi, v2, k.quad, kinks);
  const cplx z = k.zp.z();
  std::function<cplx(double)> nonlocal;
  ResidualReport r;
  switch (k.variant) {
    case GammaVariant::axis_single_A:
    case GammaVariant::axis_single_B: {
      const cplx ps = 0.5 * (bv.left + ec * bv.right);
      nonlocal = [&, ps](double x) { return v1(x) * ps; };
      r.bc = std::abs(I * bv.left - I * ec * bv.right - p1);
      break;
    }
    case GammaVariant::axis_two: {
      const cplx a1 = bv.left + 0.5 * I * p1, a2 = bv.right - 0.5 * I * p2;
      nonlocal = [&, a1, a2](double x) { return v1(x) * a1 + v2(x) * a2; };
      r.bc = std::abs(bv.right - I * p2 - e * (bv.left + I * p1));
      break;
    }
    case GammaVariant::interval_two: {
      const cplx a1 = bv.left - 0.5 * I * p1, a2 = bv.right + 0.5 * I * p2;
      nonlocal = [&, a1, a2](double x) { return v1(x) * a1 + v2(x) * a2; };
      r.bc = std::abs(bv.right + I * p2 - e * (bv.left - I * p1));
      break;
    }
    case GammaVariant::interval_single_F: {
      const cplx ps = 0.5 * (bv.left + ec * bv.right);
      nonlocal = [&, ps](double x) { return v1(x) * ps; };
      r.bc = std::abs(I * ec * bv.right - I * bv.left - p1);
      break;
    }
  }
  const auto breaks = detail::domain_breaks(k, &h);
  for (double x : grid) {
    bool near = false;
    for (double b : breaks) near = near || std::abs(x - b) < 3.5 * step;
    if (k.domain == Domain::interval && (x < 3.5 * step || x > 1.0 - 3.5 * step)) near = true;
    if (near) continue;
    const cplx res = I * derivative(psi, x, step) + nonlocal(x) - z * psi(Point(x)) - h(x);
    r.ode_max = std::max(r.ode_max, std::abs(res));
  }
  return r;
}

// ------------------------------------------------------------------ operator difference

/// Samples on a grid, used for operator_difference_K.
struct SampledFunction {
  std::vector<double> x;
  std::vector<cplx> values;
};

/**
 * Rank-two difference A(v1, v2, alpha) - A(v, 0, alpha), v = v1 + e^{i alpha} v2.
 *
 * Axis:      (i/2) e^{i alpha} v2 <psi, v1> - (i/2) e^{-i alpha} v1 <psi, v2>
 * Interval:  (i/2) e^{-i alpha} v1 <psi, v2> - (i/2) e^{i alpha} v2 <psi, v1>
 * psi and the potentials are taken as their linear interpolants on psi's
 * grid, which keeps the sampled operator exactly symmetric.
 */
inline SampledFunction operator_difference_K(const Potential& v1, const Potential& v2, BoundaryPhase alpha,
                                             const SampledFunction& psi, Domain domain,
                                             const QuadratureSpec& q = {}) {
  require_domain(v1, domain, "operator_difference_K");
  require_domain(v2, domain, "operator_difference_K");
  const auto ps = Potential::sampled(psi.x, psi.values, domain);
  auto on_grid = [&](const Potential& v) {
    std::vector<cplx> s;
    for (double x : psi.x) s.push_back(v(x));
    return Potential::sampled(psi.x, s, domain);
  };
  const cplx i1 = inner_product(ps, on_grid(v1), q), i2 = inner_product(ps, on_grid(v2), q);
  const cplx e = alpha.unit(), ec = std::conj(e);
  SampledFunction out{psi.x, {}};
  for (double x : psi.x) {
    if (domain == Domain::axis)
      out.values.push_back(0.5 * I * e * v2(x) * i1 - 0.5 * I * ec * v1(x) * i2);
    else
      out.values.push_back(0.5 * I * ec * v1(x) * i2 - 0.5 * I * e * v2(x) * i1);
  }
  return out;
}

}  // namespace momentum

#pragma once
// Measured invariants shared by the verification command and the acceptance
// suite: Gamma symmetry, kernel swap symmetry, rank of kernel differences and
// c-matrix column identities, over randomly drawn operators.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "greens.hpp"
#include "numerics.hpp"
#include "potentials.hpp"
#include "resolvent.hpp"

namespace momentum {

struct OperatorCase {
  GammaVariant variant;
  cplx z;
  Potential v1;
  Potential v2;
  BoundaryPhase alpha;
};

namespace detail {

inline Potential random_potential(std::mt19937& rng, Domain d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  const cplx k = std::polar(std::sqrt(pos(rng)), pi * u(rng));  // |k| <= 1
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: {
      const double a = 0.5 * pos(rng), b = 0.5 + 0.5 * pos(rng);
      return Potential::constant(k, a, b, d);
    }
    case 1: return Potential::exp_decay(k, 2.0 * u(rng), d);
    default:
      if (d == Domain::axis) return Potential::sign_exp().scaled(0.5 * k);
      return Potential::constant(k, 0.0, 1.0, d);
  }
}

}  // namespace detail

inline Domain domain_of(GammaVariant v) {
  return v == GammaVariant::interval_two || v == GammaVariant::interval_single_F ? Domain::interval : Domain::axis;
}

/// Random operator with potentials bounded by 1 and |Im z| in [0.3, 3].
inline OperatorCase random_case(GammaVariant variant, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  const Domain d = domain_of(variant);
  const double im = (0.3 + 2.7 * pos(rng)) * (u(rng) < 0.0 ? -1.0 : 1.0);
  double alpha = 2.0 * pi * pos(rng);
  if (variant == GammaVariant::axis_single_B && std::abs(alpha - pi) < 0.2) alpha += 0.5;  // B needs e^{i alpha} != -1
  const bool two = variant == GammaVariant::axis_two || variant == GammaVariant::interval_two;
  return {variant, cplx(3.0 * u(rng), im), detail::random_potential(rng, d),
          two ? detail::random_potential(rng, d) : Potential::zero(d), alpha};
}

/// Random operator whose potentials are constants (|value| <= 1) on random subintervals of [0, 1].
inline OperatorCase random_unit_support_case(GammaVariant variant, std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  const Domain d = domain_of(variant);
  auto pot = [&] {
    const cplx k = std::polar(std::sqrt(pos(rng)), 2.0 * pi * pos(rng));
    double a = pos(rng), b = pos(rng);
    if (a > b) std::swap(a, b);
    return Potential::constant(k, a, std::max(b, a + 0.05), d);
  };
  const bool two = variant == GammaVariant::axis_two || variant == GammaVariant::interval_two;
  const Potential v1 = pot();
  return {variant, I, v1, two ? pot() : Potential::zero(d), 2.0 * pi * pos(rng)};
}

inline KernelModel make_kernel(const OperatorCase& c) {
  const SpectralPoint z(c.z);
  switch (c.variant) {
    case GammaVariant::axis_single_A:
    case GammaVariant::axis_single_B: return kernel_axis_single(z, c.v1, c.alpha, c.variant);
    case GammaVariant::axis_two: return kernel_axis_two(z, c.v1, c.v2, c.alpha);
    case GammaVariant::interval_two: return kernel_interval(z, c.v1, c.v2, c.alpha);
    case GammaVariant::interval_single_F: return kernel_interval_single(z, c.v1, c.alpha);
  }
  throw InputError("unknown variant");
}

inline GammaMatrix make_gamma(const OperatorCase& c) { return make_kernel(c).gamma; }

/// max_jk |conj(Gamma(conj z))_kj - Gamma(z)_jk|.
inline double gamma_symmetry_defect(const OperatorCase& c) {
  OperatorCase cb = c;
  cb.z = std::conj(c.z);
  return (make_gamma(cb).m.adjoint() - make_gamma(c).m).cwiseAbs().maxCoeff();
}

/// Large-|z| behaviour of gamma(z) = det Gamma along the imaginary axis.
struct GammaDecay {
  cplx limit;        ///< two-step Richardson extrapolation from gamma at y = 640, 1280, 2560
  double order;      ///< log2 of successive differences at y = 320, 640, 1280; independent of the limit estimate
  cplx at100;        ///< gamma(100 i)
};

inline GammaDecay gamma_decay(OperatorCase c) {
  auto det = [&](double y) {
    c.z = cplx(0.0, y);
    return make_gamma(c).det;
  };
  GammaDecay d;
  // Support edges contribute terms decaying like exp(-c sqrt(y)); below y ~ 300 they can mask the 1/y tail.
  const cplx g320 = det(320.0), g640 = det(640.0), g1280 = det(1280.0), g2560 = det(2560.0);
  // Eliminates the 1/y and 1/y^2 terms.
  d.limit = (8.0 * g2560 - 6.0 * g1280 + g640) / 3.0;
  d.order = std::log2(std::abs(g320 - g640) / std::abs(g640 - g1280));
  d.at100 = det(100.0);
  return d;
}

/// Sample points inside the region where the kernel is non-trivial.
inline std::vector<Point> sample_points(const OperatorCase& c, std::mt19937& rng, int n) {
  const bool axis = domain_of(c.variant) == Domain::axis;
  std::uniform_real_distribution<double> u(axis ? -1.5 : 0.0, axis ? 2.5 : 1.0);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(u(rng));
  return p;
}

/// max |conj(K_{conj z}(y, x)) - K_z(x, y)| over consecutive point pairs.
inline double hermitian_swap_defect(const KernelModel& k, const std::vector<Point>& pts) {
  const KernelModel kb = conjugate_kernel(k);
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
    d = std::max(d, std::abs(std::conj(kb(pts[i + 1], pts[i])) - k(pts[i], pts[i + 1])));
  return d;
}

using KernelFn = std::function<cplx(Point, Point)>;

/// Singular values of a sampled kernel difference, with the magnitude of the kernel itself.
struct DifferenceSpectrum {
  Eigen::VectorXd s;
  double scale = 0.0;  ///< sigma_1 of the sampled kernel K

  /// Singular values below this are rounding noise of K, not structure of K - ref.
  double floor() const { return 1e-13 * scale; }

  int rank(double rel_tol) const {
    int r = 0;
    for (int i = 0; i < s.size(); ++i) r += s(i) > std::max(rel_tol * s(0), floor());
    return r;
  }

  /// sigma_{r+1}/sigma_1; 0 when the difference is noise or has at most r singular values.
  double excess(int r) const {
    if (s.size() <= r || s(0) <= floor()) return 0.0;
    return s(r) / s(0);
  }
};

/// (K - ref) on an n x n grid of [lo, hi]^2, y staggered off the diagonal.
inline DifferenceSpectrum difference_spectrum(const KernelFn& k, const KernelFn& ref, double lo, double hi, int n = 32) {
  Eigen::MatrixXcd m(n, n), km(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point x(lo + (hi - lo) * (i + 0.5) / n), y(lo + (hi - lo) * (j + 0.3) / n);
      km(i, j) = k(x, y);
      m(i, j) = km(i, j) - ref(x, y);
    }
  return {singular_values(m), singular_values(km)(0)};
}

inline KernelFn free_axis_kernel(cplx z) {
  const SpectralPoint zp(z);
  return [zp](Point x, Point y) { return g_axis(zp, difference(x, y)); };
}

inline KernelFn point_axis_kernel(cplx z, BoundaryPhase alpha) {
  const SpectralPoint zp(z);
  return [zp, alpha](Point x, Point y) { return G_point(zp, x, y, alpha); };
}

inline KernelFn interval_base_kernel(cplx z, BoundaryPhase alpha) {
  return [z, alpha](Point x, Point y) { return g_interval(z, x.x, y.x, alpha); };
}

inline KernelFn as_fn(const KernelModel& k) {
  return [k](Point x, Point y) { return k(x, y); };
}

}  // namespace momentum

#pragma once
// Unperturbed Green's functions: free axis kernel, point interaction at 0,
// and the unit-interval kernel. At x = 0 on the axis the side is explicit;
// Side::none there means the kernel diagonal, where theta(0) = 0.

#include <cmath>
#include <complex>
#include <vector>

#include "numerics.hpp"
#include "potentials.hpp"

namespace momentum {

enum class Side { none, minus, plus };

/// A point of the axis or interval; `side` matters only at x == 0 on the axis.
struct Point {
  double x = 0.0;
  Side side = Side::none;
  Point() = default;
  Point(double x_, Side s = Side::none) : x(x_), side(s) {}  // NOLINT
};

inline Point minus0() { return {0.0, Side::minus}; }
inline Point plus0() { return {0.0, Side::plus}; }

/// Reflection x -> -x, swapping the sides of 0.
inline Point reflect(Point p) {
  return {-p.x, p.side == Side::minus ? Side::plus : (p.side == Side::plus ? Side::minus : Side::none)};
}

class SpectralPoint {
 public:
  SpectralPoint(cplx z) : z_(z) {  // NOLINT
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InputError("spectral point must be finite");
    if (z.imag() == 0.0) throw OffAxisRequired("resolvent formulas need Im z != 0");
  }
  cplx z() const { return z_; }
  double sign() const { return z_.imag() > 0.0 ? 1.0 : -1.0; }
  bool upper() const { return z_.imag() > 0.0; }
  SpectralPoint conj() const { return SpectralPoint(std::conj(z_)); }

 private:
  cplx z_;
};

struct BoundaryValuePair {
  cplx minus;
  cplx plus;
};

/// g_z(x) = i sign(Im z) theta(-x Im z) e^{-izx}.
inline cplx g_axis(const SpectralPoint& zp, Point p) {
  const cplx z = zp.z();
  if (p.x == 0.0) {
    if (p.side == Side::minus) return zp.upper() ? I : 0.0;
    if (p.side == Side::plus) return zp.upper() ? 0.0 : -I;
    return 0.0;
  }
  if (-p.x * z.imag() <= 0.0) return 0.0;
  return zp.sign() * I * std::exp(-I * z * p.x);
}

/// Difference argument x - y. A sided y = +-0 is the limit y -> 0 taken first, so the result is x itself.
inline Point difference(Point x, Point y) {
  if (y.x == 0.0 && y.side != Side::none) return x;
  if (x.x == 0.0 && x.side != Side::none) return {-y.x, y.x == 0.0 ? x.side : Side::none};
  return {x.x - y.x};
}

/// beta(z, alpha) = i(1 - e^{-i alpha}) theta(Im z) + i(e^{i alpha} - 1) theta(-Im z).
inline cplx beta_axis(const SpectralPoint& zp, BoundaryPhase alpha) {
  const cplx e = alpha.unit();
  return zp.upper() ? I * (1.0 - std::conj(e)) : I * (e - 1.0);
}

/// w(z, alpha) with G(x, -0) = g_z(x) w.
inline cplx w_axis(const SpectralPoint& zp, BoundaryPhase alpha) { return zp.upper() ? cplx(1.0) : alpha.unit(); }

/// Point-interaction kernel G(x, y; alpha) = g(x-y) + beta g(x) g(-y).
inline cplx G_point(const SpectralPoint& zp, Point x, Point y, BoundaryPhase alpha) {
  return g_axis(zp, difference(x, y)) + beta_axis(zp, alpha) * g_axis(zp, x) * g_axis(zp, reflect(y));
}

/**
 * Multiplier of the unitary map onto the alpha = 0 operator: e^{i alpha} for x < 0, 1 for x > 0.
 *
 * Piecewise constant, so it commutes with i d/dx away from 0 and makes every
 * psi with psi(+0) = e^{i alpha} psi(-0) continuous at 0.
 */
inline cplx unitary_phase(BoundaryPhase alpha, Point p) {
  const bool left = p.x < 0.0 || (p.x == 0.0 && p.side == Side::minus);
  return left ? alpha.unit() : cplx(1.0);
}

namespace detail {

inline void check_interval_pole(cplx z, BoundaryPhase alpha) {
  const double n = std::round((z.real() + alpha.value()) / (2.0 * pi));
  const double nearest = -alpha.value() + 2.0 * pi * n;
  if (std::abs(z - nearest) <= 1e-12) throw PoleError(nearest, "z is a free interval eigenvalue");
}

}  // namespace detail

/// beta(z) = i e^{-iz}/(e^{-iz} - e^{i alpha}) in overflow-safe form.
inline cplx beta_interval(cplx z, BoundaryPhase alpha) {
  if (z.imag() >= 0.0) return I / (1.0 - std::exp(I * (z + alpha.value())));
  const cplx em = std::exp(-I * z);  // small for Im z < 0
  return I * em / (em - alpha.unit());
}

/// e^{iz} beta(z) = i/(e^{-iz} - e^{i alpha}).
inline cplx eiz_beta_interval(cplx z, BoundaryPhase alpha) {
  if (z.imag() >= 0.0) {
    const cplx q = std::exp(I * (z + alpha.value()));
    return I * std::exp(I * z) / (1.0 - q);
  }
  return I / (std::exp(-I * z) - alpha.unit());
}

/**
 * Interval kernel g(x,y;z) = e^{-iz(x-y)} [-i theta(x-y) + beta], theta(0) = 0.
 *
 * Evaluated in a form whose exponentials never exceed 1 in modulus.
 */
inline cplx g_interval(cplx z, double x, double y, BoundaryPhase alpha) {
  detail::check_interval_pole(z, alpha);
  const double a = alpha.value();
  if (z.imag() >= 0.0) {
    const cplx den = 1.0 - std::exp(I * (z + a));
    if (y >= x) return I * std::exp(I * z * (y - x)) / den;
    return I * alpha.unit() * std::exp(I * z * (1.0 + y - x)) / den;
  }
  const cplx den = 1.0 - std::exp(-I * (z + a));
  if (y >= x) return -I * std::conj(alpha.unit()) * std::exp(I * z * (y - x - 1.0)) / den;
  return -I * std::exp(I * z * (y - x)) / den;
}

/// lambda_n = -alpha + 2 pi n inside [lo, hi], ascending; eigenfunctions e^{-i lambda_n x}.
inline std::vector<double> free_spectrum_interval(BoundaryPhase alpha, double lo, double hi) {
  if (!(lo < hi)) throw InputError("free_spectrum_interval: need lo < hi");
  std::vector<double> out;
  const double a = alpha.value();
  for (double n = std::ceil((lo + a) / (2.0 * pi)); -a + 2.0 * pi * n <= hi; n += 1.0) {
    const double l = -a + 2.0 * pi * n;
    if (l >= lo) out.push_back(l);
  }
  return out;
}

inline cplx free_mode(double lambda, double x) { return std::exp(-I * lambda * x); }

// ------------------------------------------------------------ potential integrals

/// int g_z(x - y) v(y) dy on the axis (continuous in x).
inline cplx free_convolution(const Potential& v, const SpectralPoint& zp, double x, const QuadratureSpec& q = {}) {
  if (v.is_zero()) return 0.0;
  if (zp.upper()) return I * shifted_moment(v, zp.z(), x, x, inf, q);
  return -I * shifted_moment(v, zp.z(), x, -inf, x, q);
}

/// int G(x, y; alpha) v(y) dy on the axis.
inline cplx point_convolution(const Potential& v, const SpectralPoint& zp, Point x, BoundaryPhase alpha,
                              const QuadratureSpec& q = {}) {
  if (v.is_zero()) return 0.0;
  const cplx gx = g_axis(zp, x);
  cplx s = free_convolution(v, zp, x.x, q);
  if (gx != 0.0) s += beta_axis(zp, alpha) * gx * free_convolution(v, zp, 0.0, q);
  return s;
}

/// int_0^1 g(x, y; z) v(y) dy on the interval.
inline cplx interval_convolution(const Potential& v, cplx z, double x, BoundaryPhase alpha,
                                 const QuadratureSpec& q = {}) {
  detail::check_interval_pole(z, alpha);
  if (v.is_zero()) return 0.0;
  const double a = alpha.value();
  if (z.imag() >= 0.0) {
    const cplx den = 1.0 - std::exp(I * (z + a));
    return I / den * (shifted_moment(v, z, x, x, 1.0, q) + alpha.unit() * shifted_moment(v, z, x - 1.0, 0.0, x, q));
  }
  const cplx den = 1.0 - std::exp(-I * (z + a));
  return -I / den *
         (std::conj(alpha.unit()) * shifted_moment(v, z, x + 1.0, x, 1.0, q) + shifted_moment(v, z, x, 0.0, x, q));
}

}  // namespace momentum

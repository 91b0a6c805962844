#pragma once
// Nonlocal potentials: closed forms stored as exponential pieces k*e^{rate*y}
// on (lo, hi), or linear-interpolated samples. Moments of exponential pieces
// against e^{iz(y-s)} are evaluated in closed form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace momentum {

enum class Domain { axis, interval };

inline const char* to_string(Domain d) { return d == Domain::axis ? "axis" : "interval"; }

/// Axis integrals of decaying potentials are cut at |x| = 40 (e^{-40} is below double noise).
inline constexpr double axis_truncation = 40.0;
inline constexpr double inf = std::numeric_limits<double>::infinity();

class BoundaryPhase {
 public:
  BoundaryPhase(double alpha = 0.0) {  // NOLINT: implicit from a plain angle is intended
    if (!std::isfinite(alpha)) throw InputError("boundary phase must be finite");
    alpha_ = std::fmod(alpha, 2.0 * pi);
    if (alpha_ < 0.0) alpha_ += 2.0 * pi;
    if (alpha_ >= 2.0 * pi) alpha_ = 0.0;
  }
  double value() const { return alpha_; }
  cplx unit() const { return std::polar(1.0, alpha_); }  // e^{i alpha}
  operator double() const { return alpha_; }              // NOLINT

 private:
  double alpha_ = 0.0;
};

struct ExpPiece {
  cplx k;
  cplx rate;
  double lo;
  double hi;
};

class Potential {
 public:
  enum class Kind { zero, constant, exp_decay, sign_exp, sampled, composite };

  static Potential zero(Domain d = Domain::interval) { return Potential(Kind::zero, d); }

  static Potential constant(cplx value, double a = 0.0, double b = 1.0, Domain d = Domain::interval) {
    if (!(a < b)) throw InputError("constant potential: empty support");
    if (d == Domain::interval && (a < 0.0 || b > 1.0))
      throw DomainMismatch("constant potential support must lie in [0, 1]");
    if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("constant potential: support must be finite");
    Potential p(Kind::constant, d);
    p.pieces_.push_back({value, 0.0, a, b});
    return p;
  }

  /// theta(x) k e^{-(1+i gamma) x}
  static Potential exp_decay(cplx k, double gamma, Domain d = Domain::axis) {
    Potential p(Kind::exp_decay, d);
    p.gamma_ = gamma;
    p.pieces_.push_back({k, cplx(-1.0, -gamma), 0.0, d == Domain::axis ? inf : 1.0});
    return p;
  }

  /// 2i sign(x) e^{-|x|} on the axis.
  static Potential sign_exp() {
    Potential p(Kind::sign_exp, Domain::axis);
    p.pieces_.push_back({cplx(0.0, -2.0), 1.0, -inf, 0.0});
    p.pieces_.push_back({cplx(0.0, 2.0), -1.0, 0.0, inf});
    return p;
  }

  static Potential sampled(std::vector<double> x, std::vector<cplx> values, Domain d) {
    if (x.size() < 2 || x.size() != values.size()) throw InputError("sampled potential: need >= 2 matching samples");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
      if (!(x[i] < x[i + 1])) throw InputError("sampled potential: grid must be strictly increasing");
    for (auto v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("sampled potential: non-finite value");
    if (d == Domain::interval && (x.front() < 0.0 || x.back() > 1.0))
      throw DomainMismatch("sampled potential grid must lie in [0, 1]");
    Potential p(Kind::sampled, d);
    p.grid_ = std::move(x);
    p.values_ = std::move(values);
    return p;
  }

  static Potential from_pieces(std::vector<ExpPiece> pieces, Domain d) {
    Potential p(Kind::composite, d);
    for (auto pc : pieces) {
      if (d == Domain::interval) {
        pc.lo = std::max(pc.lo, 0.0);
        pc.hi = std::min(pc.hi, 1.0);
      }
      if (pc.lo < pc.hi && pc.k != 0.0) p.pieces_.push_back(pc);
    }
    return p.normalized();
  }

  Kind kind() const { return kind_; }
  Domain domain() const { return domain_; }
  bool is_sampled() const { return kind_ == Kind::sampled; }
  bool is_zero() const { return kind_ == Kind::zero; }
  const std::vector<ExpPiece>& pieces() const { return pieces_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  double gamma() const { return gamma_; }

  /// Value of a Constant potential (throws for other kinds).
  cplx constant_value() const {
    if (kind_ != Kind::constant) throw InputError("not a constant potential");
    return pieces_.front().k;
  }
  std::pair<double, double> constant_support() const {
    if (kind_ != Kind::constant) throw InputError("not a constant potential");
    return {pieces_.front().lo, pieces_.front().hi};
  }
  /// True for Constant with support exactly [0, 1].
  bool is_unit_constant() const {
    return kind_ == Kind::constant && pieces_.front().lo == 0.0 && pieces_.front().hi == 1.0;
  }

  cplx operator()(double x) const {
    if (kind_ == Kind::sampled) {
      if (x < grid_.front() || x > grid_.back()) return 0.0;
      auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
      if (it == grid_.end()) return values_.back();
      const auto j = std::size_t(it - grid_.begin());
      const double t = (x - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
      return (1.0 - t) * values_[j - 1] + t * values_[j];
    }
    cplx s = 0.0;
    for (const auto& p : pieces_)
      if (x >= p.lo && (x < p.hi || (x == p.hi && domain_ == Domain::interval && x == 1.0)))
        s += p.k * std::exp(p.rate * x);
    return s;
  }

  /// Finite points where the potential (or its form) may be non-smooth.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    if (kind_ == Kind::sampled) return grid_;
    for (const auto& p : pieces_) {
      if (std::isfinite(p.lo)) b.push_back(p.lo);
      if (std::isfinite(p.hi)) b.push_back(p.hi);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  /// Support, truncated to |x| <= axis_truncation; {0, 0} for Zero.
  std::pair<double, double> support() const {
    if (kind_ == Kind::zero) return {0.0, 0.0};
    if (kind_ == Kind::sampled) return {grid_.front(), grid_.back()};
    double lo = inf, hi = -inf;
    for (const auto& p : pieces_) {
      lo = std::min(lo, p.lo);
      hi = std::max(hi, p.hi);
    }
    return {std::max(lo, -axis_truncation), std::min(hi, axis_truncation)};
  }

  Potential scaled(cplx c) const {
    Potential p = *this;
    if (c == 0.0) return zero(domain_);
    for (auto& pc : p.pieces_) pc.k *= c;
    for (auto& v : p.values_) v *= c;
    if (kind_ == Kind::sign_exp && c != 1.0) p.kind_ = Kind::composite;
    return p;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::zero: return "zero";
      case Kind::constant: return "constant";
      case Kind::exp_decay: return "expdecay";
      case Kind::sign_exp: return "signexp";
      case Kind::sampled: return "sampled";
      case Kind::composite: return "composite";
    }
    return "?";
  }

 private:
  Potential(Kind k, Domain d) : kind_(k), domain_(d) {}

  // Classify a piece list back into the simplest named form.
  Potential normalized() const {
    if (pieces_.empty()) return zero(domain_);
    if (pieces_.size() == 1) {
      const auto& p = pieces_.front();
      if (p.rate == 0.0) return constant(p.k, p.lo, p.hi, domain_);
      const double ub = domain_ == Domain::axis ? inf : 1.0;
      if (p.lo == 0.0 && p.hi == ub && p.rate.real() == -1.0) return exp_decay(p.k, -p.rate.imag(), domain_);
    }
    if (pieces_.size() == 2 && domain_ == Domain::axis) {
      const auto s = sign_exp();
      bool same = true;
      for (int i = 0; i < 2; ++i) {
        const auto &a = pieces_[i], &b = s.pieces_[i];
        same = same && a.rate == b.rate && a.lo == b.lo && a.hi == b.hi && std::abs(a.k - b.k) <= 1e-15 * 2.0;
      }
      if (same) return s;
    }
    return *this;
  }

  Kind kind_;
  Domain domain_;
  std::vector<ExpPiece> pieces_;
  std::vector<double> grid_;
  std::vector<cplx> values_;
  double gamma_ = 0.0;
};

inline void require_domain(const Potential& v, Domain d, const char* who) {
  if (v.domain() != d && !v.is_zero())
    throw DomainMismatch(std::string(who) + ": potential domain is " + to_string(v.domain()) + ", expected " +
                         to_string(d));
}

inline double domain_lo(Domain d) { return d == Domain::axis ? -inf : 0.0; }
inline double domain_hi(Domain d) { return d == Domain::axis ? inf : 1.0; }

namespace detail {

/// Integral of k e^{rate y} e^{iz(y-s)} over (c, d); c and d may be infinite.
inline cplx piece_moment(const ExpPiece& p, cplx z, double s, double c, double d) {
  const cplx eta = I * z + p.rate;
  auto expo = [&](double y) { return I * z * (y - s) + p.rate * y; };
  const bool lo_inf = std::isinf(c), hi_inf = std::isinf(d);
  if (lo_inf && hi_inf) throw NumericalError("moment over the whole line is not supported for a single piece");
  if (hi_inf) {
    if (!(eta.real() < 0.0)) throw NumericalError("divergent tail integral (+inf)");
    return -p.k * std::exp(expo(c)) / eta;
  }
  if (lo_inf) {
    if (!(eta.real() > 0.0)) throw NumericalError("divergent tail integral (-inf)");
    return p.k * std::exp(expo(d)) / eta;
  }
  const double len = d - c;
  if (eta.real() <= 0.0) return p.k * std::exp(expo(c)) * len * phi1(eta * len);
  return p.k * std::exp(expo(d)) * len * phi1(-eta * len);
}

}  // namespace detail

/**
 * Shifted moment  int_a^b e^{iz(y-s)} v(y) dy.
 *
 * a and b may be -inf/+inf when the potential decays there. Closed forms are
 * exact; Sampled potentials use the quadrature rule on every grid segment.
 */
inline cplx shifted_moment(const Potential& v, cplx z, double s, double a, double b,
                           const QuadratureSpec& q = {}) {
  if (!(a < b) || v.is_zero()) return 0.0;
  if (v.is_sampled()) {
    const auto& g = v.grid();
    const double lo = std::max(a, g.front()), hi = std::min(b, g.back());
    if (!(lo < hi)) return 0.0;
    QuadratureSpec one = q;
    one.panels = 1;
    cplx sum = 0.0;
    const auto f = [&](double y) { return std::exp(I * z * (y - s)) * v(y); };
    auto it = std::upper_bound(g.begin(), g.end(), lo);
    double left = lo;
    for (; it != g.end() && *it < hi; ++it) {
      sum += detail::panel(f, left, *it, one);
      left = *it;
    }
    sum += detail::panel(f, left, hi, one);
    return sum;
  }
  cplx sum = 0.0;
  for (const auto& p : v.pieces()) {
    const double c = std::max(a, p.lo), d = std::min(b, p.hi);
    if (c < d) sum += detail::piece_moment(p, z, s, c, d);
  }
  return sum;
}

/**
 * <f, v> = int f(x) conj(v(x)) dx over the support of v.
 *
 * q.panels is used as panels per unit length on every smooth segment; `breaks`
 * adds non-smooth points of f (e.g. x = 0 on the axis).
 */
template <class F>
cplx inner_product(const F& f, const Potential& v, const QuadratureSpec& q = {},
                   const std::vector<double>& breaks = {}) {
  if (v.is_zero()) return 0.0;
  auto [lo, hi] = v.support();
  auto bp = v.breakpoints();
  bp.insert(bp.end(), breaks.begin(), breaks.end());
  const auto g = [&](double x) { return f(x) * std::conj(v(x)); };
  return integrate_density(g, lo, hi, double(q.panels), q, bp);
}

/// <c e^{mu x}, v> in closed form (sampled potentials fall back to the moment quadrature).
inline cplx inner_product_exp(cplx c, cplx mu, const Potential& v, const QuadratureSpec& q = {}) {
  // int c e^{mu x} conj(v) = conj( conj(c) int e^{conj(mu) x} v ),  e^{conj(mu) x} = e^{iz x} with z = -i conj(mu)
  const cplx z = -I * std::conj(mu);
  return std::conj(std::conj(c) * shifted_moment(v, z, 0.0, domain_lo(v.domain()), domain_hi(v.domain()), q));
}

/// <v_a, v_b> for two potentials on the same domain.
inline cplx inner_product(const Potential& a, const Potential& b, const QuadratureSpec& q = {}) {
  if (a.domain() != b.domain() && !a.is_zero() && !b.is_zero()) throw DomainMismatch("inner product across domains");
  if (a.is_zero() || b.is_zero()) return 0.0;
  return inner_product([&](double x) { return a(x); }, b, q, a.breakpoints());
}

inline double l2_norm(const Potential& v, const QuadratureSpec& q = {}) {
  return std::sqrt(std::abs(inner_product(v, v, q)));
}

/// int_0^1 e^{i lambda y} v(y) dy
inline cplx tilde_v(const Potential& v, double lambda, const QuadratureSpec& q = {}) {
  require_domain(v, Domain::interval, "tilde_v");
  return shifted_moment(v, lambda, 0.0, 0.0, 1.0, q);
}

/// int_0^1 conj(vj(x)) int_0^x e^{-i lambda (x-y)} vk(y) dy dx
inline cplx cross_hat(const Potential& vk, const Potential& vj, double lambda, const QuadratureSpec& q = {}) {
  require_domain(vk, Domain::interval, "hat_v");
  require_domain(vj, Domain::interval, "hat_v");
  if (vk.is_zero() || vj.is_zero()) return 0.0;
  if (vk.is_unit_constant() && vj.is_unit_constant())
    return vk.constant_value() * std::conj(vj.constant_value()) * phi2(cplx(0.0, -lambda));
  const auto inner = [&](double x) { return shifted_moment(vk, lambda, x, 0.0, x, q); };
  return inner_product(inner, vj, q, vk.breakpoints());
}

inline cplx hat_v(const Potential& v, double lambda, const QuadratureSpec& q = {}) {
  return cross_hat(v, v, lambda, q);
}

/**
 * Pointwise v1 + e^{i alpha} v2.
 *
 * Closed forms combine exactly (merged pieces, reclassified as Zero/Constant/
 * ExpDecay/SignExp when possible). A Sampled operand forces a Sampled result
 * on the finer of the available grids.
 */
inline Potential combine(const Potential& v1, const Potential& v2, BoundaryPhase alpha) {
  if (!v1.is_zero() && !v2.is_zero() && v1.domain() != v2.domain()) throw DomainMismatch("combine across domains");
  const Domain d = v1.is_zero() ? v2.domain() : v1.domain();
  const cplx e = alpha.unit();
  if (v1.is_sampled() || v2.is_sampled()) {
    const auto& g = !v2.is_sampled() ? v1.grid()
                    : !v1.is_sampled() ? v2.grid()
                    : (v1.grid().size() / (v1.grid().back() - v1.grid().front()) >=
                               v2.grid().size() / (v2.grid().back() - v2.grid().front())
                           ? v1.grid()
                           : v2.grid());
    std::vector<cplx> vals;
    for (double x : g) vals.push_back(v1(x) + e * v2(x));
    return Potential::sampled(g, vals, d);
  }
  std::vector<ExpPiece> all = v1.pieces();
  for (auto p : v2.pieces()) {
    p.k *= e;
    all.push_back(p);
  }
  std::vector<ExpPiece> merged;
  double scale = 0.0;
  for (const auto& p : all) scale = std::max(scale, std::abs(p.k));
  for (const auto& p : all) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const ExpPiece& m) {
      return m.rate == p.rate && m.lo == p.lo && m.hi == p.hi;
    });
    if (it == merged.end())
      merged.push_back(p);
    else
      it->k += p.k;
  }
  std::vector<ExpPiece> kept;
  for (auto p : merged)
    if (std::abs(p.k) > 1e-14 * scale) kept.push_back(p);
  return Potential::from_pieces(kept, d);
}

}  // namespace momentum

#pragma once
/**
 * @file numerics.hpp
 * @brief Quadrature, bracketed real roots, small complex solves and numerical rank.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace momentum {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------- errors

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid caller input (bad domain, real z where Im z != 0 is required...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver its contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class EvaluationFailure : public NumericalError {
 public:
  EvaluationFailure(double node, const std::string& what)
      : NumericalError(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  double node() const { return node_; }

 private:
  double node_;
};

class BudgetExceeded : public NumericalError {
 public:
  BudgetExceeded(double best, const std::string& what)
      : NumericalError(what + " (best iterate " + std::to_string(best) + ")"), best_(best) {}
  double best() const { return best_; }

 private:
  double best_;
};

class SingularSystem : public NumericalError {
 public:
  SingularSystem(cplx det, const std::string& what)
      : NumericalError(what + " (|det| = " + std::to_string(std::abs(det)) + ")"), det_(det) {}
  cplx det() const { return det_; }

 private:
  cplx det_;
};

class DomainMismatch : public InputError {
 public:
  using InputError::InputError;
};

class OffAxisRequired : public InputError {
 public:
  using InputError::InputError;
};

class PoleError : public InputError {
 public:
  PoleError(double nearest, const std::string& what)
      : InputError(what + " (nearest pole " + std::to_string(nearest) + ")"), nearest_(nearest) {}
  double nearest() const { return nearest_; }

 private:
  double nearest_;
};

class VariantUnavailable : public InputError {
 public:
  using InputError::InputError;
};

// ---------------------------------------------------------------- small helpers

/// e^w - 1 without cancellation for small |w|.
inline cplx expm1(cplx w) {
  const double a = w.real(), b = w.imag();
  const double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

/// (e^w - 1)/w, equal to 1 at w = 0.
inline cplx phi1(cplx w) {
  if (std::abs(w) < 1e-4) return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0));
  return expm1(w) / w;
}

/// (phi1(w) - 1)/w = sum_{n>=0} w^n/(n+2)!, equal to 1/2 at w = 0.
inline cplx phi2(cplx w) {
  if (std::abs(w) < 1.0) {
    cplx term = 0.5, sum = 0.5;
    for (int n = 1; n < 30; ++n) {
      term *= w / double(n + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (phi1(w) - 1.0) / w;
}

inline double theta(double x) { return x > 0.0 ? 1.0 : 0.0; }

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// ---------------------------------------------------------------- quadrature

enum class QuadratureRule { gauss_legendre, trapezoid };

/// Composite rule. `panels` counts panels on the integration range passed to
/// integrate(); the library's inner products read it as panels per unit length.
struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::gauss_legendre;
  int panels = 64;
  int points = 8;

  void validate() const {
    if (panels < 1 || points < 1) throw InputError("quadrature: panels and points must be positive");
    const long total = rule == QuadratureRule::trapezoid ? long(panels) + 1 : long(panels) * points;
    if (total < 2) throw InputError("quadrature: fewer than two nodes");
  }
};

namespace detail {

struct GaussTable {
  std::vector<double> x, w;  // on [-1, 1], ascending
};

inline const GaussTable& gauss_table(int p) {
  static std::mutex guard;
  static std::map<int, GaussTable> cache;
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  GaussTable t;
  const auto zeros = boost::math::legendre_p_zeros<double>(p);  // non-negative half
  for (double z : zeros) {
    const double d = boost::math::legendre_p_prime(p, z);
    const double w = 2.0 / ((1.0 - z * z) * d * d);
    t.x.push_back(z);
    t.w.push_back(w);
    if (z != 0.0) {
      t.x.push_back(-z);
      t.w.push_back(w);
    }
  }
  std::vector<std::size_t> order(t.x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t.x[a] < t.x[b]; });
  GaussTable sorted;
  for (auto i : order) {
    sorted.x.push_back(t.x[i]);
    sorted.w.push_back(t.w[i]);
  }
  return cache.emplace(p, std::move(sorted)).first->second;
}

template <class F>
cplx checked_eval(const F& f, double x) {
  const cplx v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw EvaluationFailure(x, "non-finite integrand");
  return v;
}

/// One smooth panel [a, b].
template <class F>
cplx panel(const F& f, double a, double b, const QuadratureSpec& q) {
  if (q.rule == QuadratureRule::trapezoid) return 0.5 * (b - a) * (checked_eval(f, a) + checked_eval(f, b));
  const auto& t = gauss_table(q.points);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx s = 0.0;
  for (std::size_t i = 0; i < t.x.size(); ++i) s += t.w[i] * checked_eval(f, c + h * t.x[i]);
  return h * s;
}

/// Sorted, de-duplicated cut points of [a, b] including the ends.
inline std::vector<double> cut_points(double a, double b, const std::vector<double>& breaks) {
  std::vector<double> cuts{a, b};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace detail

/// Composite rule with q.panels uniform panels on [a, b]; breakpoints become extra panel ends.
template <class F>
cplx integrate(const F& f, double a, double b, const QuadratureSpec& q = {},
               const std::vector<double>& breakpoints = {}) {
  q.validate();
  if (!(a < b)) throw InputError("integrate: need a < b");
  auto all = breakpoints;
  for (int k = 1; k < q.panels; ++k) all.push_back(a + (b - a) * double(k) / q.panels);
  const auto cuts = detail::cut_points(a, b, all);
  cplx s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += detail::panel(f, cuts[i], cuts[i + 1], q);
  return s;
}

/// Panels of width <= 1/density on every segment between breakpoints.
template <class F>
cplx integrate_density(const F& f, double a, double b, double density, const QuadratureSpec& q,
                       const std::vector<double>& breakpoints = {}) {
  if (!(a < b)) return 0.0;
  const auto cuts = detail::cut_points(a, b, breakpoints);
  cplx s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const int n = std::max(1, int(std::ceil((hi - lo) * density - 1e-9)));
    for (int k = 0; k < n; ++k) {
      const double pa = lo + (hi - lo) * k / n;
      const double pb = k + 1 == n ? hi : lo + (hi - lo) * (k + 1) / n;
      s += detail::panel(f, pa, pb, q);
    }
  }
  return s;
}

// ---------------------------------------------------------------- roots

struct Bracket {
  double lo;
  double hi;
};

struct RootInfo {
  double x;
  bool tangent;  ///< found as a touching zero (no sign change)
};

namespace detail {

inline double refine_root(const std::function<double(double)>& f, double lo, double hi, double flo,
                          double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
  };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= 200) throw BudgetExceeded(0.5 * (r.first + r.second), "root refinement did not converge");
  const double a = r.first, b = r.second;
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

}  // namespace detail

/**
 * Roots of a real function on each bracket, with tangent detection.
 *
 * Sign changes are refined by TOMS 748. Brackets without a sign change are
 * scanned for interior local minima of |f|; a minimum is a tangent root when
 * |f| there is <= tol*scale and the fitted curvature of f*sign(f) is positive.
 * `scale` is the largest |f| seen on the bracket scan.
 */
inline std::vector<RootInfo> find_real_roots_detailed(const std::function<double(double)>& f,
                                                      const std::vector<Bracket>& brackets, double tol,
                                                      int scan_points = 16) {
  std::vector<RootInfo> out;
  for (const auto& b : brackets) {
    if (!(b.lo < b.hi)) throw InputError("find_real_roots: bracket needs lo < hi");
    const double flo = f(b.lo), fhi = f(b.hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) throw EvaluationFailure(b.lo, "non-finite bracket end");
    if (flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0)) {
      const double r = detail::refine_root(f, b.lo, b.hi, flo, fhi);
      out.push_back({r, false});
      continue;
    }
    // Tangency scan.
    std::vector<double> xs(scan_points + 1), fs(scan_points + 1);
    double scale = 0.0;
    for (int k = 0; k <= scan_points; ++k) {
      xs[k] = b.lo + (b.hi - b.lo) * k / scan_points;
      fs[k] = k == 0 ? flo : (k == scan_points ? fhi : f(xs[k]));
      scale = std::max(scale, std::abs(fs[k]));
    }
    for (int k = 1; k < scan_points; ++k) {
      if (!(std::abs(fs[k]) <= std::abs(fs[k - 1]) && std::abs(fs[k]) <= std::abs(fs[k + 1]))) continue;
      if ((fs[k] < 0.0) != (fs[k - 1] < 0.0) || (fs[k] < 0.0) != (fs[k + 1] < 0.0)) continue;
      const double s = fs[k] < 0.0 ? -1.0 : 1.0;
      auto g = [&](double x) { return s * f(x); };
      std::uintmax_t iters = 200;
      auto m = boost::math::tools::brent_find_minima(g, xs[k - 1], xs[k + 1], 52, iters);
      const double xm = m.first, gm = m.second;
      if (gm < 0.0) {  // dipped through zero between scan points: two simple roots
        out.push_back({detail::refine_root(f, xs[k - 1], xm, f(xs[k - 1]), f(xm)), false});
        out.push_back({detail::refine_root(f, xm, xs[k + 1], f(xm), f(xs[k + 1])), false});
        continue;
      }
      const double h = 1e-3 * (xs[k + 1] - xs[k - 1]);
      const double curv = g(xm + h) - 2.0 * gm + g(xm - h);
      if (gm <= tol * std::max(scale, 1e-300) && curv > 0.0) out.push_back({xm, true});
    }
  }
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.x < b.x; });
  std::vector<RootInfo> uniq;
  for (const auto& r : out) {
    if (!uniq.empty() && std::abs(r.x - uniq.back().x) <= 1e-9 * std::max(1.0, std::abs(r.x))) {
      uniq.back().tangent = uniq.back().tangent || r.tangent;
      continue;
    }
    uniq.push_back(r);
  }
  return uniq;
}

inline std::vector<double> find_real_roots(const std::function<double(double)>& f,
                                           const std::vector<Bracket>& brackets, double tol = 1e-12) {
  std::vector<double> xs;
  for (const auto& r : find_real_roots_detailed(f, brackets, tol)) xs.push_back(r.x);
  return xs;
}

/// Equal-width sub-brackets of [lo, hi].
inline std::vector<Bracket> subdivide(double lo, double hi, int parts) {
  std::vector<Bracket> out;
  for (int k = 0; k < parts; ++k)
    out.push_back({lo + (hi - lo) * k / parts, k + 1 == parts ? hi : lo + (hi - lo) * (k + 1) / parts});
  return out;
}

// ---------------------------------------------------------------- linear algebra

/// Solves M x = rhs for n in {2, 3}; rejects near-singular M relative to its row norms.
inline Eigen::VectorXcd solve_small(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& rhs,
                                    double threshold = 1e-13) {
  const auto n = m.rows();
  if (n != m.cols() || (n != 2 && n != 3) || rhs.size() != n)
    throw InputError("solve_small: expects a 2x2 or 3x3 system");
  const cplx det = m.determinant();
  double scale = 1.0;
  for (Eigen::Index r = 0; r < n; ++r) scale *= std::max(m.row(r).norm(), 1e-300);
  if (!(std::abs(det) > threshold * scale)) throw SingularSystem(det, "near-singular small system");
  return m.fullPivLu().solve(rhs);
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& k) {
  if (!k.allFinite()) throw EvaluationFailure(0.0, "non-finite kernel sample");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k);
  return svd.singularValues();
}

/// Count of singular values >= rel_tol * sigma_1 (0 for the zero matrix).
inline int numerical_rank(const Eigen::MatrixXcd& k, double rel_tol = 1e-8) {
  const auto s = singular_values(k);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) >= rel_tol * s(0)) ++r;
  return r;
}

}  // namespace momentum

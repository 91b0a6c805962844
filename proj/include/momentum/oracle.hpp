#pragma once
/**
 * @file oracle.hpp
 * @brief Independent box-scheme discretization of the interval and axis eigenproblems.
 *
 * Unknowns are node values; each cell carries the equation
 *   (i/h)(psi_{j+1} - psi_j) + sum_k vbar_k,j P_k(psi) = lambda (psi_j + psi_{j+1})/2,
 * with inner products taken on cell averages. The discrete Green identity
 * telescopes exactly, so after eliminating the constrained nodes the matrix
 * acting on cell averages is Hermitian and a Hermitian eigensolver applies.
 */

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "greens.hpp"
#include "numerics.hpp"
#include "potentials.hpp"

namespace momentum {

struct DiscreteOperator {
  Domain domain = Domain::interval;
  int n = 0;                   ///< number of cells (matrix size)
  double h = 0.0;
  double L = 0.0;              ///< axis truncation radius
  double twist = 1.0;          ///< axis ring closure psi(L) = twist * psi(-L)
  BoundaryPhase alpha;
  std::vector<double> centers; ///< cell midpoints, in matrix order
  std::vector<cplx> matrix;    ///< row-major n x n, acts on cell averages
  std::string description;

  cplx operator()(int i, int j) const { return matrix[std::size_t(i) * n + j]; }
  double hermitian_defect() const {
    double d = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        s = std::max(s, std::abs((*this)(i, j)));
      }
    return d / std::max(s, 1e-300);
  }
};

namespace detail {

/// Boundary-node evaluation inside a nonlocal coefficient: coef * psi(node).
struct NodeTerm {
  cplx coef;
  int node;  ///< index into the full node list
};

/// Inner-product part of a coefficient: coef * <psi, w>.
struct InnerTerm {
  cplx coef;
  std::vector<cplx> wbar;  ///< cell averages of w
};

/// One nonlocal term vcol(x) * P(psi).
struct NonlocalTerm {
  std::vector<cplx> vbar;
  std::vector<NodeTerm> nodes;
  std::vector<InnerTerm> inners;
};

/// Full nodes are either a free unknown (times a factor) or the one dense-eliminated node.
struct NodeRef {
  int phi = -1;  ///< -1 marks the dense node
  cplx factor = 1.0;
};

struct BoxLayout {
  int n = 0;
  double h = 0.0;
  std::vector<int> left, right;  ///< full node indices of each cell (left node is free with factor 1)
  std::vector<NodeRef> nodes;
  std::vector<NodeTerm> bc_nodes;     ///< boundary condition: sum coef psi(node) + sum coef <psi, w> = 0
  std::vector<InnerTerm> bc_inners;
  std::vector<NonlocalTerm> terms;
};

inline std::vector<cplx> cell_averages(const Potential& v, const std::vector<double>& edges_lo, double h) {
  std::vector<cplx> out(edges_lo.size(), 0.0);
  if (v.is_zero()) return out;
  auto bp = v.breakpoints();
  std::sort(bp.begin(), bp.end());
  const QuadratureSpec q{QuadratureRule::gauss_legendre, 1, 8};
  const auto [slo, shi] = v.support();
  for (std::size_t j = 0; j < edges_lo.size(); ++j) {
    const double a = edges_lo[j], b = a + h;
    if (b <= slo || a >= shi) continue;
    std::vector<double> inside(std::upper_bound(bp.begin(), bp.end(), a), std::lower_bound(bp.begin(), bp.end(), b));
    out[j] = integrate([&](double x) { return v(x); }, a, b, q, inside) / h;
  }
  return out;
}

/// Coefficients on the full nodes of  h sum_j conj(wbar_j) (psi_left + psi_right)/2.
inline void add_inner_to_nodes(const BoxLayout& b, const InnerTerm& t, std::vector<cplx>& beta) {
  for (int j = 0; j < b.n; ++j) {
    const cplx c = t.coef * 0.5 * b.h * std::conj(t.wbar[j]);
    beta[b.left[j]] += c;
    beta[b.right[j]] += c;
  }
}

/**
 * H = (2i/h)(I - G) + sum_k vbar_k r_k^T with G = (MQ)^{-1}.
 *
 * MQ = T + m c^T, where T has 1/2 on the diagonal and at most one entry above
 * it per row; rows of T^{-1} follow from a two-term recursion.
 */
inline DiscreteOperator assemble(const BoxLayout& b) {
  const int n = b.n;
  std::vector<int> off(n, -1), prev(n, -1);
  std::vector<cplx> toff(n, 0.0), m(n, 0.0);
  int dense = -1;
  for (std::size_t k = 0; k < b.nodes.size(); ++k)
    if (b.nodes[k].phi < 0) dense = int(k);
  for (int j = 0; j < n; ++j) {
    const auto& r = b.nodes[b.right[j]];
    if (r.phi < 0) {
      m[j] = 0.5;
    } else {
      if (r.phi <= j) throw NumericalError("box layout: T must be upper triangular");
      off[j] = r.phi;
      toff[j] = 0.5 * r.factor;
      prev[r.phi] = j;
    }
  }
  // Dense elimination row: psi_dense = c^T phi.
  std::vector<cplx> beta(b.nodes.size(), 0.0);
  for (const auto& t : b.bc_nodes) beta[t.node] += t.coef;
  for (const auto& t : b.bc_inners) add_inner_to_nodes(b, t, beta);
  if (dense < 0 || std::abs(beta[dense]) < 1e-12) throw SingularSystem(beta[dense < 0 ? 0 : dense], "box layout: cannot eliminate");
  std::vector<cplx> c(n, 0.0);
  for (std::size_t k = 0; k < b.nodes.size(); ++k)
    if (int(k) != dense) c[b.nodes[k].phi] -= beta[k] * b.nodes[k].factor / beta[dense];

  auto solve_row = [&](const std::vector<cplx>& r) {  // y T = r
    std::vector<cplx> y(n);
    for (int col = 0; col < n; ++col) y[col] = 2.0 * (r[col] - (prev[col] >= 0 ? toff[prev[col]] * y[prev[col]] : 0.0));
    return y;
  };
  std::vector<cplx> w(n);  // T w = m
  for (int j = n - 1; j >= 0; --j) w[j] = 2.0 * (m[j] - (off[j] >= 0 ? toff[j] * w[off[j]] : 0.0));
  const auto z = solve_row(c);
  cplx den = 1.0;
  for (int j = 0; j < n; ++j) den += z[j] * m[j];
  if (std::abs(den) < 1e-10) throw SingularSystem(den, "box layout: degenerate averaging map");

  DiscreteOperator d;
  d.n = n;
  d.h = b.h;
  d.matrix.assign(std::size_t(n) * n, 0.0);
  const cplx s = 2.0 * I / b.h;
  // Rows of G needed by node terms: row k of T^{-1} minus w_k z/den, or z/den for the dense node.
  std::vector<std::vector<cplx>> rterms(b.terms.size(), std::vector<cplx>(n, 0.0));
  for (std::size_t t = 0; t < b.terms.size(); ++t) {
    for (const auto& nt : b.terms[t].nodes) {
      const auto& ref = b.nodes[nt.node];
      if (ref.phi < 0) {
        for (int j = 0; j < n; ++j) rterms[t][j] += nt.coef * z[j] / den;
      } else {
        std::vector<cplx> e(n, 0.0);
        e[ref.phi] = ref.factor;
        const auto row = solve_row(e);
        cplx wk = 0.0;
        for (int j = 0; j < n; ++j) wk += e[j] * w[j];
        for (int j = 0; j < n; ++j) rterms[t][j] += nt.coef * (row[j] - wk * z[j] / den);
      }
    }
    for (const auto& it : b.terms[t].inners)
      for (int j = 0; j < n; ++j) rterms[t][j] += it.coef * b.h * std::conj(it.wbar[j]);
  }
  // (2i/h)(I - T^{-1} + w z^T/den), row by row.
  std::vector<cplx> row(n);
  for (int i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    row[i] = 2.0;
    for (int col = i + 1; col < n; ++col) row[col] = prev[col] >= 0 ? -2.0 * toff[prev[col]] * row[prev[col]] : 0.0;
    cplx* out = d.matrix.data() + std::size_t(i) * n;
    const cplx wi = w[i] / den;
    for (int j = 0; j < n; ++j) out[j] = s * ((i == j ? 1.0 : 0.0) - row[j] + wi * z[j]);
    for (std::size_t t = 0; t < b.terms.size(); ++t) {
      const cplx vb = b.terms[t].vbar[i];
      if (vb == 0.0) continue;
      for (int j = 0; j < n; ++j) out[j] += vb * rterms[t][j];
    }
  }
  return d;
}

}  // namespace detail

/**
 * Interval operator A(v1, v2, alpha) on N cells.
 *
 * N is raised by one when (-1)^N is close to e^{i alpha}: the alternating
 * node pattern would otherwise satisfy the boundary condition and make the
 * averaging map singular.
 */
inline DiscreteOperator discretize_interval(const Potential& v1, const Potential& v2, BoundaryPhase alpha, int N) {
  if (N < 64) throw InputError("discretize_interval: N >= 64 required");
  require_domain(v1, Domain::interval, "discretize_interval");
  require_domain(v2, Domain::interval, "discretize_interval");
  if (std::abs((N % 2 == 0 ? 1.0 : -1.0) - alpha.unit()) < 1.0) ++N;
  detail::BoxLayout b;
  b.n = N;
  b.h = 1.0 / N;
  std::vector<double> lo(N);
  for (int j = 0; j < N; ++j) {
    lo[j] = j * b.h;
    b.left.push_back(j);
    b.right.push_back(j + 1);
  }
  for (int j = 0; j < N; ++j) b.nodes.push_back({j, 1.0});
  b.nodes.push_back({-1, 1.0});  // psi(1)
  const auto w1 = detail::cell_averages(v1, lo, b.h), w2 = detail::cell_averages(v2, lo, b.h);
  const cplx e = alpha.unit();
  // psi(1) + i<psi,v2> - e^{i alpha} psi(0) + i e^{i alpha} <psi,v1> = 0
  b.bc_nodes = {{1.0, N}, {-e, 0}};
  b.bc_inners = {{I, w2}, {I * e, w1}};
  // v1 [psi(0) - (i/2)<psi,v1>] + v2 [psi(1) + (i/2)<psi,v2>]
  if (!v1.is_zero()) b.terms.push_back({w1, {{1.0, 0}}, {{-0.5 * I, w1}}});
  if (!v2.is_zero()) b.terms.push_back({w2, {{1.0, N}}, {{0.5 * I, w2}}});
  auto d = detail::assemble(b);
  d.domain = Domain::interval;
  d.alpha = alpha;
  for (int j = 0; j < N; ++j) d.centers.push_back((j + 0.5) * b.h);
  d.description = "interval box scheme, N=" + std::to_string(N);
  return d;
}

namespace detail {

inline double tail_mass(const Potential& v, double L) {
  if (v.is_zero()) return 0.0;
  const auto [lo, hi] = v.support();
  const auto f = [&](double x) { return cplx(std::norm(v(x))); };
  double m = 0.0;
  if (hi > L) m += integrate_density(f, L, hi, 8.0, {}, v.breakpoints()).real();
  if (lo < -L) m += integrate_density(f, lo, -L, 8.0, {}, v.breakpoints()).real();
  return m;
}

/// Axis layout: cells ordered right half first, then left half, so T stays upper triangular.
inline BoxLayout axis_layout(double L, int M, double twist, std::vector<double>& lo) {
  BoxLayout b;
  b.n = 2 * M;
  b.h = L / M;
  // Full nodes: R_0..R_{M-1} (0..M-1), L_0..L_{M-1} (M..2M-1), L_M = psi(-0) (2M, dense), R_M = twist L_0 (2M+1).
  for (int j = 0; j < 2 * M; ++j) b.nodes.push_back({j, 1.0});
  b.nodes.push_back({-1, 1.0});
  b.nodes.push_back({M, twist});
  for (int j = 0; j < M; ++j) {
    b.left.push_back(j);
    b.right.push_back(j + 1 < M ? j + 1 : 2 * M + 1);
    lo.push_back(j * b.h);
  }
  for (int j = 0; j < M; ++j) {
    b.left.push_back(M + j);
    b.right.push_back(j + 1 < M ? M + j + 1 : 2 * M);
    lo.push_back(-L + j * b.h);
  }
  return b;
}

}  // namespace detail

/**
 * Axis operator A(v, alpha) truncated to a ring on [-L, L] with M = N/2 cells per side.
 *
 * The ring twist is chosen so that the alternating node pattern cannot meet
 * the jump condition at 0; localized states do not feel it.
 */
inline DiscreteOperator discretize_axis(const Potential& v, BoundaryPhase alpha, double L, int N) {
  require_domain(v, Domain::axis, "discretize_axis");
  if (N < 64) throw InputError("discretize_axis: N >= 64 required");
  if (!(L > 0.0)) throw InputError("discretize_axis: L > 0 required");
  if (detail::tail_mass(v, L) >= 1e-10) throw InputError("discretize_axis: potential mass beyond L exceeds 1e-10");
  const int M = (N + 1) / 2;
  const cplx e = alpha.unit();
  const double twist = std::abs(1.0 - e) >= std::sqrt(2.0) - 1e-12 ? 1.0 : -1.0;
  std::vector<double> lo;
  auto b = detail::axis_layout(L, M, twist, lo);
  const auto w = detail::cell_averages(v, lo, b.h);
  const int m0 = 2 * M, p0 = 0;  // psi(-0), psi(+0)
  // i psi(-0) - i e^{-i alpha} psi(+0) - <psi, v> = 0
  b.bc_nodes = {{I, m0}, {-I * std::conj(e), p0}};
  b.bc_inners = {{-1.0, w}};
  if (!v.is_zero()) b.terms.push_back({w, {{0.5, m0}, {0.5 * std::conj(e), p0}}, {}});
  auto d = detail::assemble(b);
  d.domain = Domain::axis;
  d.alpha = alpha;
  d.L = L;
  d.twist = twist;
  for (double a : lo) d.centers.push_back(a + 0.5 * b.h);
  d.description = "axis box scheme (ring), L=" + std::to_string(L) + ", cells=" + std::to_string(2 * M);
  return d;
}

struct OraclePair {
  double lambda;
  std::vector<cplx> cells;  ///< eigenvector as cell averages, unit discrete L2 norm
  double localized_mass;    ///< fraction of mass with |x| <= L/2 (axis), 1 on the interval
};

/**
 * Eigenpairs with eigenvalue in (lo, hi], ascending.
 *
 * Axis operators keep only states with at least `localization` of their mass
 * inside |x| <= L/2; box modes spread over the whole ring.
 */
inline std::vector<OraclePair> oracle_eigenpairs(const DiscreteOperator& d, double lo, double hi,
                                                 double localization = 0.99, bool vectors = true) {
  if (!(lo < hi)) throw InputError("oracle: need lo < hi");
  const int n = d.n;
  const double length = d.domain == Domain::axis ? 2.0 * d.L : 1.0;
  const int bound = std::min(n, 2 * int(std::ceil(length * (hi - lo) / (2.0 * pi))) + 16);
  // The row-major buffer read as column-major is conj(H); eigenvectors are conjugated back below.
  std::vector<cplx> a = d.matrix;
  std::vector<double> w(n);
  const bool jobz = vectors || d.domain == Domain::axis;
  std::vector<cplx> z(jobz ? std::size_t(n) * bound : 1);
  std::vector<lapack_int> support(2 * std::size_t(bound));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, jobz ? 'V' : 'N', 'V', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()),
                                         n, lo, hi, 0, 0, 0.0, &found, w.data(),
                                         reinterpret_cast<lapack_complex_double*>(z.data()), jobz ? n : 1,
                                         support.data());
  if (info != 0) throw NumericalError("oracle: zheevr failed with info " + std::to_string(info));
  if (found > bound) throw NumericalError("oracle: eigenvalue count exceeded workspace bound");
  std::vector<OraclePair> out;
  for (lapack_int k = 0; k < found; ++k) {
    if (!jobz) {
      out.push_back({w[k], {}, 1.0});
      continue;
    }
    OraclePair p{w[k], std::vector<cplx>(n), 1.0};
    double total = 0.0, inside = 0.0;
    for (int j = 0; j < n; ++j) {
      p.cells[j] = std::conj(z[std::size_t(k) * n + j]);
      const double m = std::norm(p.cells[j]);
      total += m;
      if (d.domain == Domain::interval || std::abs(d.centers[j]) <= 0.5 * d.L) inside += m;
    }
    const double scale = 1.0 / std::sqrt(total * d.h);
    for (auto& c : p.cells) c *= scale;
    p.localized_mass = inside / total;
    if (d.domain == Domain::axis && p.localized_mass < localization) continue;
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<double> oracle_eigenvalues(const DiscreteOperator& d, double lo, double hi,
                                              double localization = 0.99) {
  std::vector<double> out;
  for (const auto& p : oracle_eigenpairs(d, lo, hi, localization, false)) out.push_back(p.lambda);
  return out;
}

}  // namespace momentum

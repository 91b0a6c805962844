#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "momentum/checks.hpp"
#include "momentum/resolvent.hpp"

using namespace momentum;

namespace {

const Potential unit_axis = Potential::constant(1.0, 0.0, 1.0, Domain::axis);

double gamma_symmetry_defect(const GammaMatrix& g, const GammaMatrix& gbar) {
  return (gbar.m.adjoint() - g.m).cwiseAbs().maxCoeff();
}

std::vector<Point> random_points(std::mt19937& rng, double lo, double hi, int n) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(u(rng));
  return p;
}

Eigen::MatrixXcd sample_difference(const KernelModel& k, const std::function<cplx(Point, Point)>& ref, double lo,
                                   double hi, int n = 32) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point x(lo + (hi - lo) * (i + 0.5) / n), y(lo + (hi - lo) * (j + 0.3) / n);
      m(i, j) = k(x, y) - ref(x, y);
    }
  return m;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * (i + 0.5) / n);
  return g;
}

}  // namespace

// ---------------------------------------------------------------- single potential, axis

TEST(AxisSingle, ZeroPotentialEntries) {
  for (cplx w : {I, cplx(0.3, -2.0)}) {
    const SpectralPoint z(w);
    const auto g = gamma_axis_single(z, Potential::zero(Domain::axis), 0.4);
    EXPECT_EQ(g(1, 1), cplx(0.0));
    EXPECT_EQ(g(1, 2), cplx(1.0));
    EXPECT_EQ(g(2, 1), cplx(1.0));
    EXPECT_EQ(g(2, 2), -0.5 * I * z.sign());
    EXPECT_NEAR(std::abs(g.det + 1.0), 0.0, 1e-15);
    const auto k = kernel_axis_single(z, Potential::zero(Domain::axis), 0.4);
    for (double x : {-0.5, 0.7})
      EXPECT_NEAR(std::abs(k(Point(x), Point(0.2)) - G_point(z, x, 0.2, 0.4)), 0.0, 1e-15);
  }
}

TEST(AxisSingle, GammaHermitian) {
  const SpectralPoint z(cplx(1.0, 1.0));
  for (auto variant : {GammaVariant::axis_single_A, GammaVariant::axis_single_B}) {
    const auto g = gamma_axis_single(z, unit_axis, 0.7, variant);
    const auto gb = gamma_axis_single(z.conj(), unit_axis, 0.7, variant);
    EXPECT_LT(gamma_symmetry_defect(g, gb), 1e-12);
    EXPECT_LT(g.det_consistency(), 1e-13);
  }
}

TEST(AxisSingle, VariantBUnavailableAtPi) {
  EXPECT_THROW(gamma_axis_single(I, unit_axis, pi, GammaVariant::axis_single_B), VariantUnavailable);
  EXPECT_NO_THROW(gamma_axis_single(I, unit_axis, pi, GammaVariant::axis_single_A));
}

TEST(AxisSingle, DeterminantTendsToMinusOne) {
  const auto g = gamma_axis_single(50.0 * I, unit_axis, 0.0);
  EXPECT_LT(std::abs(g.det + 1.0), 0.05);
}

TEST(AxisSingle, VariantsAgree) {
  std::mt19937 rng(3);
  const auto pts = random_points(rng, -1.0, 2.0, 40);
  for (cplx w : {I, cplx(0.5, -0.8)}) {
    const auto a = kernel_axis_single(w, unit_axis, 0.3, GammaVariant::axis_single_A);
    const auto b = kernel_axis_single(w, unit_axis, 0.3, GammaVariant::axis_single_B);
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) d = std::max(d, std::abs(a(pts[i], pts[i + 1]) - b(pts[i], pts[i + 1])));
    EXPECT_LT(d, 1e-10);
  }
}

TEST(AxisSingle, RankStructure) {
  const SpectralPoint z(I);
  const auto v = Potential::exp_decay(cplx(0.0, 1.0), 0.5);
  const auto k = kernel_axis_single(z, v, 0.3);
  const auto free = [&](Point x, Point y) { return g_axis(z, difference(x, y)); };
  const auto point = [&](Point x, Point y) { return G_point(z, x, y, 0.3); };
  EXPECT_LE(numerical_rank(sample_difference(k, free, -1.5, 2.5)), 2);
  EXPECT_LE(numerical_rank(sample_difference(k, point, -1.5, 2.5)), 2);
}

TEST(AxisSingle, HermitianSwap) {
  std::mt19937 rng(5);
  const auto pts = random_points(rng, -1.0, 2.0, 40);
  for (auto variant : {GammaVariant::axis_single_A, GammaVariant::axis_single_B})
    EXPECT_LT(hermitian_swap_defect(kernel_axis_single(cplx(0.4, 0.9), Potential::sign_exp(), 1.2, variant), pts),
              1e-10);
}

// ---------------------------------------------------------------- two potentials, axis

TEST(AxisTwo, ZeroPotentialEntries) {
  const double a = 0.9;
  for (cplx w : {I, cplx(0.2, -1.0)}) {
    const SpectralPoint z(w);
    const auto g = gamma_axis_two(z, Potential::zero(Domain::axis), Potential::zero(Domain::axis), a);
    const double s = z.sign(), tp = z.upper(), tm = 1.0 - tp;
    EXPECT_NEAR(std::abs(g(1, 1) - 2.0 * I * s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(2, 2) - 2.0 * I * s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(1, 2) - 4.0 * I * std::exp(-I * a) * tp), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(2, 1) + 4.0 * I * std::exp(I * a) * tm), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g.det + 4.0), 0.0, 1e-14);
  }
}

TEST(AxisTwo, GammaHermitian) {
  const SpectralPoint z(cplx(2.0, -0.5));
  const auto v2 = Potential::exp_decay(1.0, 0.0);
  const auto g = gamma_axis_two(z, unit_axis, v2, 0.6), gb = gamma_axis_two(z.conj(), unit_axis, v2, 0.6);
  EXPECT_LT(gamma_symmetry_defect(g, gb), 1e-11);
  EXPECT_LT(g.det_consistency(), 1e-13);
}

TEST(AxisTwo, DeterminantTendsToMinusFour) {
  const auto v2 = Potential::constant(cplx(0.0, 1.0), 0.0, 1.0, Domain::axis);
  EXPECT_LT(std::abs(gamma_axis_two(100.0 * I, unit_axis, v2, 0.5).det + 4.0), 0.1);
}

TEST(AxisTwo, CMatrixColumnIdentityAndKernel) {
  const auto v2 = Potential::exp_decay(cplx(0.5, 0.5), 1.0);
  const double a = 1.4;
  const SpectralPoint z(I);
  const auto k = kernel_axis_two(z, unit_axis, v2, a);
  const auto c = c_matrix(k.gamma, a);
  EXPECT_LT(c_matrix_column_defect(c, GammaVariant::axis_two, a), 1e-12);
  const auto ke = kernel_axis_two_expanded(z, unit_axis, v2, a);
  std::mt19937 rng(9);
  const auto pts = random_points(rng, -1.0, 3.0, 40);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
    EXPECT_NEAR(std::abs(k(pts[i], pts[i + 1]) - ke(pts[i], pts[i + 1])), 0.0, 1e-12);
}

TEST(AxisTwo, RankStructure) {
  const SpectralPoint z(cplx(0.3, 1.0));
  const auto v2 = Potential::exp_decay(cplx(0.0, 2.0), 0.5);
  const auto k = kernel_axis_two(z, unit_axis, v2, 0.8);
  const auto free = [&](Point x, Point y) { return g_axis(z, difference(x, y)); };
  const auto point = [&](Point x, Point y) { return G_point(z, x, y, 0.8); };
  EXPECT_LE(numerical_rank(sample_difference(k, point, -1.5, 2.5)), 2);
  EXPECT_LE(numerical_rank(sample_difference(k, free, -1.5, 2.5)), 3);
}

TEST(AxisTwo, ReducesToSinglePotential) {
  const auto v = Potential::exp_decay(cplx(1.0, 2.0), 0.3);
  const double a = 2.1;
  const auto v1 = v.scaled(0.5), v2 = v.scaled(0.5 * std::exp(-I * a));
  std::mt19937 rng(13);
  const auto pts = random_points(rng, -1.0, 3.0, 40);
  for (cplx w : {I, cplx(-0.5, -1.2)}) {
    const auto k2 = kernel_axis_two(w, v1, v2, a);
    const auto k1 = kernel_axis_single(w, v, a);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
      EXPECT_NEAR(std::abs(k2(pts[i], pts[i + 1]) - k1(pts[i], pts[i + 1])), 0.0, 1e-10);
  }
}

TEST(AxisTwo, HermitianSwap) {
  std::mt19937 rng(17);
  const auto pts = random_points(rng, -1.0, 2.0, 40);
  const auto k = kernel_axis_two(cplx(-0.7, 0.6), Potential::sign_exp(), unit_axis, 2.5);
  EXPECT_LT(hermitian_swap_defect(k, pts), 1e-10);
}

// ---------------------------------------------------------------- interval

TEST(Interval, ZeroPotentials) {
  const auto zero = Potential::zero();
  const auto k = kernel_interval(cplx(0.5, 1.0), zero, zero, 1.1);
  for (double x : {0.1, 0.7})
    EXPECT_NEAR(std::abs(k(Point(x), Point(0.4)) - g_interval(cplx(0.5, 1.0), x, 0.4, 1.1)), 0.0, 1e-15);
  EXPECT_LT(std::abs(gamma_interval(50.0 * I, zero, zero, 1.1).det + 4.0), 0.05);
}

TEST(Interval, GammaHermitianAndCMatrix) {
  const auto v1 = Potential::constant(cplx(0.5, -0.2)), v2 = Potential::exp_decay(cplx(0.0, 1.0), 2.0, Domain::interval);
  const double a = 0.8;
  const SpectralPoint z(cplx(1.5, 0.4));
  const auto g = gamma_interval(z, v1, v2, a), gb = gamma_interval(z.conj(), v1, v2, a);
  EXPECT_LT(gamma_symmetry_defect(g, gb), 1e-11);
  const auto c = c_matrix(g, a);
  EXPECT_LT((c - c_matrix_interval_tabulated(g, a)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(c_matrix_column_defect(c, GammaVariant::interval_two, a), 1e-12);
  const auto k = kernel_interval(z, v1, v2, a), ke = kernel_interval_expanded(z, v1, v2, a);
  std::mt19937 rng(19);
  const auto pts = random_points(rng, 0.0, 1.0, 40);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
    EXPECT_NEAR(std::abs(k(pts[i], pts[i + 1]) - ke(pts[i], pts[i + 1])), 0.0, 1e-12);
  EXPECT_LT(hermitian_swap_defect(k, pts), 1e-10);
}

TEST(Interval, RankStructure) {
  const cplx w(0.5, 1.0);
  const auto k = kernel_interval(w, Potential::constant(1.0), Potential::constant(cplx(0.0, 0.5)), 1.1);
  EXPECT_LE(numerical_rank(sample_difference(
                k, [&](Point x, Point y) { return g_interval(w, x.x, y.x, 1.1); }, 0.0, 1.0)),
            2);
}

TEST(Interval, SingleFVariantMatchesReduction) {
  const auto v = Potential::constant(cplx(1.0, 2.0));
  const double a = 1.3;
  for (cplx w : {cplx(0.4, 1.0), cplx(2.0, -0.6)}) {
    const auto kf = kernel_interval_single(w, v, a);
    const auto k2 = kernel_interval(w, v.scaled(0.5), v.scaled(0.5 * std::exp(-I * a)), a);
    for (double x : {0.1, 0.55, 0.9})
      for (double y : {0.2, 0.7})
        EXPECT_NEAR(std::abs(kf(Point(x), Point(y)) - k2(Point(x), Point(y))), 0.0, 1e-11);
    const auto g = kernel_interval_single(std::conj(w), v, a).gamma;
    EXPECT_LT(gamma_symmetry_defect(kf.gamma, g), 1e-12);
  }
}

TEST(Interval, PoleRejected) { EXPECT_THROW(gamma_interval(cplx(pi, 0.0) + 1e-14 * I, Potential::zero(), Potential::zero(), pi), PoleError); }

// ---------------------------------------------------------------- application

TEST(Apply, ZeroRightHandSide) {
  const auto k = kernel_axis_single(I, unit_axis, 0.0);
  const auto s = apply_resolvent(k, Potential::zero(Domain::axis), {-1.0, 0.5, 2.0});
  for (auto v : s.values) EXPECT_EQ(v, cplx(0.0));
}

namespace {

void check_solution(const KernelModel& k, const Potential& h, double lo, double hi) {
  const auto sol = apply_resolvent(k, h);
  const auto r = check_resolvent_solution(k, sol.psi, h, grid(lo, hi, 1000));
  EXPECT_LT(r.ode_max, 1e-6) << to_string(k.variant);
  EXPECT_LT(r.bc, 1e-8) << to_string(k.variant);
  EXPECT_LT(sol.from_psi.max_difference(sol.from_system), 1e-10) << to_string(k.variant);
}

}  // namespace

TEST(Apply, ResidualsAllVariants) {
  const cplx z = I;
  const auto h_axis = Potential::constant(1.0, 0.0, 1.0, Domain::axis);
  const auto h_int = Potential::constant(1.0);
  check_solution(kernel_axis_single(z, unit_axis, 0.0, GammaVariant::axis_single_A), h_axis, -3.0, 4.0);
  check_solution(kernel_axis_single(z, unit_axis, 0.0, GammaVariant::axis_single_B), h_axis, -3.0, 4.0);
  check_solution(kernel_axis_single(z, Potential::sign_exp(), 1.0, GammaVariant::axis_single_A), h_axis, -3.0, 4.0);
  check_solution(kernel_axis_two(z, unit_axis, Potential::exp_decay(cplx(0, 1), 0.5), 0.7), h_axis, -3.0, 4.0);
  check_solution(kernel_interval(z, Potential::constant(1.0), Potential::constant(cplx(0.5, 0.5)), 0.7), h_int, 0.0,
                 1.0);
  check_solution(kernel_interval_single(z, Potential::constant(cplx(0.0, 2.0)), pi), h_int, 0.0, 1.0);
}

TEST(Apply, BoundarySystemMatchesCramer) {
  const auto k = kernel_axis_single(cplx(0.2, 1.0), Potential::sign_exp(), 0.4);
  const std::vector<double> xs = grid(-2.0, 2.0, 64);
  std::vector<cplx> hv;
  for (double x : xs) hv.push_back(std::exp(-x * x) * cplx(1.0, x));
  const auto h = Potential::sampled(xs, hv, Domain::axis);
  const auto s = intermediates_from_system(k, h);
  // Cramer on the same 2x2 system.
  const auto& g = k.gamma;
  std::vector<cplx> rhs;
  for (const auto& r : k.right)
    rhs.push_back(integrate_density([&](double y) { return h(y) * std::conj(r(Point(y))); }, xs.front(), xs.back(),
                                    64.0, k.quad, xs));
  const cplx m11 = -g(2, 2), m12 = g(1, 2), m21 = g(2, 1), m22 = -g(1, 1);
  const cplx d = m11 * m22 - m12 * m21;
  EXPECT_NEAR(std::abs(*s.w - (rhs[0] * m22 - m12 * rhs[1]) / d), 0.0, 1e-13 * std::abs(*s.w) + 1e-15);
  EXPECT_NEAR(std::abs(*s.psi_s - (m11 * rhs[1] - m21 * rhs[0]) / d), 0.0, 1e-13 * std::abs(*s.psi_s) + 1e-15);
}

TEST(Apply, FirstResolventIdentity) {
  const auto v1 = Potential::constant(1.0), v2 = Potential::constant(cplx(0.0, 0.5));
  const double a = 0.9;
  const auto h = Potential::constant(1.0);
  const auto k1 = kernel_interval(I, v1, v2, a), k2 = kernel_interval(2.0 * I, v1, v2, a);
  const auto r1 = apply_resolvent(k1, h), r2 = apply_resolvent(k2, h);
  // R_{z1}(R_{z2} h) by quadrature on a fine grid, then compare in L2.
  const auto inner = [&](double y) { return r2.psi(Point(y)); };
  double err2 = 0.0;
  const auto xs = grid(0.0, 1.0, 200);
  for (double x : xs) {
    const cplx rr = apply_kernel_numeric(k1, inner, Point(x), 0.0, 1.0);
    const cplx lhs = r1.psi(Point(x)) - r2.psi(Point(x));
    err2 += std::norm(lhs - (I - 2.0 * I) * rr) / xs.size();
  }
  EXPECT_LT(std::sqrt(err2), 1e-6);
}

// ---------------------------------------------------------------- operator difference

TEST(OperatorDifference, VanishesOnReductionFamily) {
  const auto v = Potential::constant(cplx(1.0, -0.5));
  const double a = 1.7;
  SampledFunction psi;
  for (int i = 0; i <= 100; ++i) {
    psi.x.push_back(i / 100.0);
    psi.values.push_back(std::exp(I * 3.0 * psi.x.back()) + psi.x.back());
  }
  const auto k = operator_difference_K(v.scaled(0.5), v.scaled(0.5 * std::exp(-I * a)), a, psi, Domain::interval);
  for (auto c : k.values) EXPECT_NEAR(std::abs(c), 0.0, 1e-14);
  const auto kz = operator_difference_K(v, Potential::zero(), a, psi, Domain::interval);
  for (auto c : kz.values) EXPECT_EQ(c, cplx(0.0));
  const auto vax = Potential::exp_decay(cplx(1.0, 1.0), 0.2);
  SampledFunction pa;
  for (int i = 0; i <= 400; ++i) {
    pa.x.push_back(-10.0 + 20.0 * i / 400.0);
    pa.values.push_back(std::exp(-pa.x.back() * pa.x.back()));
  }
  const auto ka = operator_difference_K(vax.scaled(0.5), vax.scaled(0.5 * std::exp(-I * a)), a, pa, Domain::axis);
  for (auto c : ka.values) EXPECT_NEAR(std::abs(c), 0.0, 1e-14);
}

TEST(OperatorDifference, Symmetric) {
  const auto v1 = Potential::constant(cplx(1.0, 0.3)), v2 = Potential::exp_decay(cplx(0.0, 2.0), 1.0, Domain::interval);
  for (Domain d : {Domain::interval, Domain::axis}) {
    // Continuous potentials: a jump would cost O(h) in the sampled representation.
    std::vector<double> gx;
    std::vector<cplx> b1, b2;
    for (int i = 0; i <= 800; ++i) {
      gx.push_back(-2.0 + 8.0 * i / 800.0);
      b1.push_back(std::exp(-gx.back() * gx.back()));
      b2.push_back(cplx(0.0, gx.back()) * std::exp(-gx.back() * gx.back()));
    }
    const auto a1 = d == Domain::axis ? Potential::sampled(gx, b1, d) : v1;
    const auto a2 = d == Domain::axis ? Potential::sampled(gx, b2, d) : v2;
    SampledFunction psi, phi;
    const double lo = d == Domain::axis ? -2.0 : 0.0, hi = d == Domain::axis ? 6.0 : 1.0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = lo + (hi - lo) * i / 2000.0;
      psi.x.push_back(x);
      phi.x.push_back(x);
      psi.values.push_back(std::exp(I * 2.0 * x) * (1.0 + x * x) / (1.0 + x * x * x * x));
      phi.values.push_back(cplx(std::cos(x), x) / (1.0 + x * x));
    }
    const auto kpsi = operator_difference_K(a1, a2, 0.6, psi, d), kphi = operator_difference_K(a1, a2, 0.6, phi, d);
    const auto sp = [&](const SampledFunction& f, const SampledFunction& g) {
      return inner_product(Potential::sampled(f.x, f.values, d), Potential::sampled(g.x, g.values, d));
    };
    EXPECT_NEAR(std::abs(sp(kpsi, phi) - sp(psi, kphi)), 0.0, 1e-10) << to_string(d);
  }
}

TEST(GammaQuadrature, CrossTermsRespectBothSupports) {
  // Convolution with one potential has kinks inside the other's support.
  const cplx z(-1.6, -0.34);
  const auto a1 = Potential::constant(cplx(0.3, -0.8), 0.13, 0.61, Domain::axis),
             a2 = Potential::constant(cplx(-0.5, 0.2), 0.37, 0.94, Domain::axis);
  const auto ga = gamma_axis_two(z, a1, a2, 1.7), gab = gamma_axis_two(std::conj(z), a1, a2, 1.7);
  EXPECT_LT(gamma_symmetry_defect(ga, gab), 1e-12);
  const auto i1 = Potential::constant(cplx(0.3, -0.8), 0.13, 0.61), i2 = Potential::constant(cplx(-0.5, 0.2), 0.37, 0.94);
  const auto gi = gamma_interval(z, i1, i2, 5.8), gib = gamma_interval(std::conj(z), i1, i2, 5.8);
  EXPECT_LT(gamma_symmetry_defect(gi, gib), 1e-12);
}

TEST(GammaAsymptotics, DecayStudy) {
  // gamma(iy) approaches a constant like 1/y: -1 for the single-potential
  // variants A and F, -4 for the two-potential variants.
  std::mt19937 rng(41);
  const std::vector<std::pair<GammaVariant, double>> expected{{GammaVariant::axis_single_A, -1.0},
                                                              {GammaVariant::interval_single_F, -1.0},
                                                              {GammaVariant::axis_two, -4.0},
                                                              {GammaVariant::interval_two, -4.0}};
  for (const auto& [v, c] : expected)
    for (int i = 0; i < 5; ++i) {
      const auto d = gamma_decay(random_unit_support_case(v, rng));
      EXPECT_NEAR(std::abs(d.limit - c), 0.0, 1e-3) << to_string(v);
      EXPECT_GT(d.order, 0.8) << to_string(v);
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "momentum/spectrum.hpp"

using namespace momentum;

namespace {

Potential axis_const(cplx k) { return Potential::constant(k, 0.0, 1.0, Domain::axis); }

/// Sign changes of f on a fine grid, refined by bisection: an oracle independent of the bracket logic.
std::vector<double> grid_roots(const std::function<double(double)>& f, double lo, double hi, int n) {
  std::vector<double> out;
  double a = lo, fa = f(lo);
  for (int k = 1; k <= n; ++k) {
    const double b = lo + (hi - lo) * k / n, fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-14; ++it) {
        const double m = 0.5 * (x0 + x1), fm = f(m);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return out;
}

std::vector<double> lambdas(const std::vector<EigenResult>& rs) {
  std::vector<double> out;
  for (const auto& r : rs) out.push_back(r.lambda);
  return out;
}

}  // namespace

// ------------------------------------------------------------------ axis

TEST(AxisCandidate, Example41ClosedForm) {
  const double a = 0.9;
  const auto v = axis_const(2.0 * I * std::polar(1.0, a));
  const auto c = axis_candidate(0.0, v);
  EXPECT_TRUE(c.square_integrable);
  for (double x : {0.1, 0.4, 0.75, 0.99})
    EXPECT_NEAR(std::abs(c.psi(Point(x)) - 2.0 * std::polar(1.0, a) * (1.0 - x)), 0.0, 1e-13);
  for (double x : {-2.0, -0.3, 1.2, 5.0}) EXPECT_NEAR(std::abs(c.psi(Point(x))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.right0 - 2.0 * std::polar(1.0, a)), 0.0, 1e-14);
  EXPECT_EQ(c.left0, cplx(0.0));
}

TEST(AxisCandidate, Example42DecayingEigenfunction) {
  const double a = 0.4, g = 0.5;
  const cplx k = 2.0 * I * std::polar(1.0, a);
  const auto c = axis_candidate(g, Potential::exp_decay(k, g));
  for (double x : {0.05, 0.5, 2.0, 7.0})
    EXPECT_NEAR(std::abs(c.psi(Point(x)) - (-I * k * std::exp(-(1.0 + I * g) * x))), 0.0, 1e-13);
  // Same modulus as the printed -ik e^{-x}.
  EXPECT_NEAR(std::abs(c.psi(Point(1.3))), std::abs(k) * std::exp(-1.3), 1e-13);
  EXPECT_NEAR(std::abs(c.psi(Point(-1.0))), 0.0, 1e-15);
}

TEST(AxisCandidate, ZeroPotentialGivesZero) {
  const auto c = axis_candidate(1.3, Potential::zero(Domain::axis));
  for (double x : {-1.0, 0.0, 2.0}) EXPECT_EQ(c.psi(Point(x)), cplx(0.0));
}

TEST(AxisCandidate, SquareIntegrabilityFlag) {
  EXPECT_THROW(Potential::from_pieces({{1.0, 0.0, 0.0, inf}}, Domain::axis), InputError);
  const auto flat = Potential::from_pieces({{1.0, I, 0.0, inf}}, Domain::axis);  // oscillates, no decay
  EXPECT_FALSE(axis_candidate(0.5, flat).square_integrable);
  const auto slow = Potential::from_pieces({{1.0, -0.05, 0.0, inf}}, Domain::axis);
  EXPECT_FALSE(axis_candidate(0.5, slow).square_integrable);
  EXPECT_FALSE(axis_eigen_test(0.5, slow, 0.0).accepted);
  EXPECT_TRUE(axis_candidate(0.5, Potential::sign_exp()).square_integrable);
}

TEST(AxisEigenTest, Example41AcceptAndReject) {
  const double a = 0.9;
  const auto v = axis_const(2.0 * I * std::polar(1.0, a));
  const auto t0 = axis_eigen_test(0.0, v, a);
  EXPECT_TRUE(t0.accepted);
  EXPECT_LT(t0.defect1, 1e-12);
  EXPECT_LT(t0.defect2, 1e-12);
  EXPECT_EQ(t0.result.multiplicity, 1);
  const auto t1 = axis_eigen_test(0.5, v, a);
  EXPECT_FALSE(t1.accepted);
  const auto c = axis_candidate(0.5, v);
  const double first = std::abs(c.left0 + std::conj(std::polar(1.0, a)) * c.right0);
  EXPECT_NEAR(first, 2.0 * std::sin(0.25) / 0.25, 1e-13);
  EXPECT_LT(first, 2.0);
  EXPECT_GT(t1.defect1, 1e-3);
}

TEST(AxisEigenTest, Example43BoundaryValues) {
  const auto v = Potential::sign_exp();
  for (double l : {1.0, -1.0}) {
    const auto c = axis_candidate(l, v);
    EXPECT_NEAR(std::abs(c.right0 - cplx(1.0, l)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c.left0 - cplx(1.0, -l)), 0.0, 1e-14);
    const auto t = axis_eigen_test(l, v, 0.0);
    EXPECT_TRUE(t.accepted);
    // <psi_lambda, v> = 4 lambda / (1 + lambda^2): 2 at lambda = 1, -2 at lambda = -1.
    EXPECT_NEAR(std::abs(t.inner - 2.0 * l), 0.0, 1e-12);
  }
}

TEST(AxisEigenTest, ZeroPotentialRejectsEverything) {
  for (double l : {-3.0, 0.0, 0.7, 4.0}) {
    const auto t = axis_eigen_test(l, Potential::zero(Domain::axis), 0.3);
    EXPECT_FALSE(t.accepted);
    EXPECT_NEAR(t.defect1, 2.0, 1e-15);
  }
}

TEST(AxisScan, FindsExactlyTheStatedEigenvalues) {
  const auto s43 = axis_scan(Potential::sign_exp(), 0.0, -10.0, 10.0);
  ASSERT_EQ(s43.size(), 2u);
  EXPECT_NEAR(s43[0].lambda, -1.0, 1e-12);
  EXPECT_NEAR(s43[1].lambda, 1.0, 1e-12);
  const double a = 2.2;
  const auto s41 = axis_scan(axis_const(2.0 * I * std::polar(1.0, a)), a, -10.0, 10.0);
  ASSERT_EQ(s41.size(), 1u);
  EXPECT_NEAR(s41[0].lambda, 0.0, 1e-12);
  const auto s42 = axis_scan(Potential::exp_decay(2.0 * I * std::polar(1.0, a), 0.5), a, -10.0, 10.0);
  ASSERT_EQ(s42.size(), 1u);
  EXPECT_NEAR(s42[0].lambda, 0.5, 1e-12);
  for (const auto* s : {&s41, &s42, &s43})
    for (const auto& r : *s) {
      EXPECT_LT(r.defect1, 1e-10);
      EXPECT_LT(r.defect2, 1e-10);
    }
  EXPECT_TRUE(axis_scan(Potential::zero(Domain::axis), 0.0, -5.0, 5.0).empty());
}

TEST(AxisScan, AcceptedEigenfunctionsSolveTheEquation) {
  EXPECT_LT(axis_eigen_residual(1.0, Potential::sign_exp(), 0.0), 1e-6);
  EXPECT_LT(axis_eigen_residual(-1.0, Potential::sign_exp(), 0.0), 1e-6);
  const double a = 0.6;
  EXPECT_LT(axis_eigen_residual(0.5, Potential::exp_decay(2.0 * I * std::polar(1.0, a), 0.5), a), 1e-6);
  EXPECT_LT(axis_eigen_residual(0.0, axis_const(2.0 * I * std::polar(1.0, a)), a), 1e-6);
  // A rejected lambda still solves the equation away from 0 but fails the jump conditions.
  EXPECT_FALSE(axis_eigen_test(0.3, Potential::sign_exp(), 0.0).accepted);
}

// ------------------------------------------------------------------ characteristic function

TEST(ChiGeneral, FreeCase) {
  for (double a : {0.0, 1.1, pi})
    for (double l : {-2.0, 0.4, 5.5}) {
      const auto c = chi_general(l, Potential::zero(), a);
      EXPECT_NEAR(std::abs(c.chi - 2.0 * I * (std::exp(-I * l) - std::polar(1.0, a))), 0.0, 1e-15);
    }
  for (double l : free_spectrum_interval(0.7, -20.0, 20.0))
    EXPECT_NEAR(std::abs(chi_general(l, Potential::zero(), 0.7).chi), 0.0, 1e-14);
}

TEST(ChiGeneral, RealAfterPhaseFactor) {
  const auto v = Potential::exp_decay(cplx(0.7, -1.2), 2.0, Domain::interval);
  for (double a : {0.3, 2.0, pi})
    for (double l : {-7.0, -0.5, 0.0, 1.9, 13.0}) {
      const cplx w = chi_general(l, v, a).chi * std::exp(0.5 * I * (l - a));
      EXPECT_NEAR(w.imag(), 0.0, 1e-13 * std::max(1.0, std::abs(w)));
    }
}

TEST(ChiGeneral, ResonantDoubleRootAtZero) {
  const auto v = Potential::constant(cplx(0.0, 2.0));
  EXPECT_NEAR(std::abs(chi_general(0.0, v, pi).chi), 0.0, 1e-15);
  // Tangency: the real reduction keeps its sign on both sides of 0.
  const double fl = chi_real(-1e-3, v, pi), fr = chi_real(1e-3, v, pi);
  EXPECT_EQ(fl < 0.0, fr < 0.0);
  EXPECT_GT(std::abs(fl), 0.0);
}

TEST(ChiConst, MatchesSystemDeterminant) {
  for (cplx V : {cplx(1.0), cplx(0.0, 2.0), cplx(3.0, -1.0)})
    for (double l : {-11.0, -0.3, 0.0, 2.5, 17.0})
      EXPECT_NEAR(std::abs(chi_general(l, Potential::constant(V), pi).chi - I * chi_const(l, V)), 0.0,
                  1e-12 * std::max(1.0, std::abs(chi_const(l, V))));
}

TEST(ChiConst, SameZeroSetsAsSystemDeterminant) {
  for (cplx V : {cplx(1.0), cplx(0.0, 2.0), cplx(3.0, -1.0)}) {
    const auto v = Potential::constant(V);
    const auto rc = grid_roots([&](double l) { return std::real(chi_const(l, V) * std::exp(0.5 * I * (l - pi)) * I); },
                               -30.0, 30.0, 3001);
    const auto rg = grid_roots([&](double l) { return chi_real(l, v, pi); }, -30.0, 30.0, 3001);
    ASSERT_EQ(rc.size(), rg.size());
    for (std::size_t i = 0; i < rc.size(); ++i) EXPECT_NEAR(rc[i], rg[i], 1e-10);
  }
}

TEST(ChiConst, LimitsAtZero) {
  EXPECT_NEAR(std::abs(chi_const(0.0, cplx(0.0, 2.0))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(chi_const(1e-7, cplx(0.0, 2.0))), 0.0, 1e-12);
  // V = 0: 4 + 2(e^{-i lambda} - 1) = 2(1 + e^{-i lambda}).
  for (double l : {0.0, 1.0, pi, 4.0}) EXPECT_NEAR(std::abs(chi_const(l, 0.0) - 2.0 * (1.0 + std::exp(-I * l))), 0.0, 1e-14);
}

TEST(ChiGeneral, RootsMatchDiscretization) {
  const auto v = Potential::constant(1.0);
  const auto roots = grid_roots([&](double l) { return chi_real(l, v, pi); }, -25.0, 25.0, 2501);
  const auto d = discretize_interval(v, Potential::zero(), pi, 2000);
  const auto ev = oracle_eigenvalues(d, -25.0, 25.0);
  ASSERT_EQ(roots.size(), ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(roots[i], ev[i], 1e-3);
}

// ------------------------------------------------------------------ constant potentials

TEST(SpectralCharacteristic, Examples) {
  EXPECT_DOUBLE_EQ(spectral_characteristic(cplx(0.0, 2.0)).S, 1.0);
  EXPECT_TRUE(spectral_characteristic(cplx(0.0, 2.0)).resonant);
  EXPECT_DOUBLE_EQ(spectral_characteristic(cplx(0.0, 4.0)).S, 0.0);
  EXPECT_DOUBLE_EQ(spectral_characteristic(0.0).S, 0.0);
  const double phi = 0.8;
  const cplx V(2.0 * std::sin(2.0 * phi), 4.0 * std::sin(phi) * std::sin(phi));
  EXPECT_NEAR(spectral_characteristic(V).S, 0.0, 1e-14);
  EXPECT_FALSE(spectral_characteristic(cplx(0.01, 2.0)).resonant);
}

TEST(SpectralCharacteristic, BoundedByOneViaCompletedSquare) {
  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int i = 0; i < 100000; ++i) {
    const cplx V(g(rng), g(rng));
    const double S = spectral_characteristic(V).S;
    ASSERT_LE(S, 1.0);
    ASSERT_NEAR(S, 1.0 - std::norm(V - cplx(0.0, 2.0)) / 4.0, 1e-12 * std::max(1.0, std::norm(V)));
  }
}

TEST(FFunction, Values) {
  EXPECT_DOUBLE_EQ(F(0.0), 1.0);
  EXPECT_DOUBLE_EQ(F(1.3), F(-1.3));
  EXPECT_NEAR(F(1.0), 4.0 / pi, 1e-15);
  EXPECT_THROW(F(2.0), PoleError);
  EXPECT_THROW(F(-6.0), PoleError);
  EXPECT_NEAR(F(1e-6), 1.0, 1e-12);
}

TEST(EigenvaluesConst, FreeLattice) {
  const auto r = lambdas(eigenvalues_const(0.0, 0.0, 20.0));
  ASSERT_EQ(r.size(), 3u);
  for (int n = 0; n < 3; ++n) EXPECT_NEAR(r[n], (2 * n + 1) * pi, 1e-14);
}

TEST(EigenvaluesConst, SameSpectrumForEqualCharacteristic) {
  const auto a = lambdas(eigenvalues_const(cplx(0.0, 4.0), -20.0, 20.0));
  const auto b = lambdas(eigenvalues_const(0.0, -20.0, 20.0));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(EigenvaluesConst, ResonantDoubleZero) {
  const auto r = eigenvalues_const(cplx(0.0, 2.0), -1.0, 12.0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].lambda, 0.0);
  EXPECT_EQ(r[0].multiplicity, 2);
  ASSERT_EQ(r[0].eigenfunctions.size(), 2u);
  // psi_1 proportional to 1, psi_2 proportional to x - 1/2.
  const auto& f1 = r[0].eigenfunctions[0];
  const auto& f2 = r[0].eigenfunctions[1];
  for (double x : {0.1, 0.6, 0.95}) EXPECT_NEAR(std::abs(f1(x) - f1(0.3)), 0.0, 1e-12);
  const cplx slope = f2(1.0) - f2(0.0);
  for (double x : {0.0, 0.2, 0.5, 0.8}) EXPECT_NEAR(std::abs(f2(x) - slope * (x - 0.5)), 0.0, 1e-12);
  // First positive root of tan(u) = u, doubled.
  EXPECT_NEAR(r[1].lambda, 8.986818915818, 1e-10);
  EXPECT_EQ(r[1].multiplicity, 1);
  for (const auto& e : r) {
    EXPECT_LT(e.defect1, 1e-12);
    EXPECT_LT(e.defect2, 1e-8);
  }
}

TEST(EigenvaluesConst, ResonanceOnlyForTwoI) {
  for (cplx V : {cplx(0.0, 2.01), cplx(0.1, 2.0), cplx(1.0, 1.0), cplx(0.0, 4.0)})
    for (const auto& r : eigenvalues_const(V, -1.0, 1.0)) {
      EXPECT_NE(r.lambda, 0.0);
      EXPECT_EQ(r.multiplicity, 1);
    }
}

TEST(EigenvaluesConst, Symmetric) {
  for (cplx V : {cplx(1.0, 1.0), cplx(4.0, 0.0), cplx(0.0, 2.0), cplx(std::sqrt(2.0), 2.0)}) {
    const auto r = lambdas(eigenvalues_const(V, -40.0, 40.0));
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], -r[r.size() - 1 - i]);
  }
}

TEST(EigenvaluesConst, RootsSolveTheTangentEquation) {
  for (cplx V : {cplx(1.0, 1.0), cplx(4.0, 0.0), cplx(0.3, -2.0)}) {
    const double s = 1.0 / spectral_characteristic(V).S;
    const auto r = eigenvalues_const(V, -35.0, 35.0);
    const auto g = grid_roots([&](double l) { return std::real(chi_const(l, V) * std::exp(0.5 * I * l)); }, -35.0, 35.0, 7001);
    ASSERT_EQ(r.size(), g.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_NEAR(r[i].lambda, g[i], 1e-10);
      EXPECT_NEAR(F(2.0 * r[i].lambda / pi), s, 1e-9 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST(EigenvaluesConst, NegativeInverseCharacteristicLocation) {
  // V = 4: S = -4. Positive roots lie just above the odd multiples of pi.
  const auto r = eigenvalues_const(cplx(4.0, 0.0), 0.0, 60.0);
  ASSERT_FALSE(r.empty());
  for (std::size_t n = 1; n <= r.size(); ++n) {
    EXPECT_GT(r[n - 1].lambda, (2.0 * n - 1.0) * pi);
    EXPECT_LT(r[n - 1].lambda, 2.0 * n * pi);
  }
  for (int n = 6; n <= 9; ++n) EXPECT_NEAR(r[n - 1].lambda, eigenvalue_asymptotic(cplx(4.0, 0.0), n), 0.5 / (n * n * n) + 0.02);
}

TEST(EigenvaluesConst, IntervalOfLocationAboveOne) {
  const cplx V(std::sqrt(2.0), 2.0);  // S = 1/2, 1/S = 2
  ASSERT_NEAR(spectral_characteristic(V).S, 0.5, 1e-14);
  const auto r = lambdas(eigenvalues_const(V, 0.0, 50.0));
  ASSERT_GE(r.size(), 5u);
  EXPECT_GT(r[0], 0.0);
  EXPECT_LT(r[0], pi);
  for (std::size_t n = 1; n < r.size(); ++n) {
    EXPECT_GT(r[n], 2.0 * n * pi);
    EXPECT_LT(r[n], (2.0 * n + 1.0) * pi);
  }
}

TEST(EigenvalueAsymptotic, Formulas) {
  EXPECT_NEAR(eigenvalue_asymptotic(cplx(0.0, 2.0), 3), 7.0 * pi - 4.0 / (7.0 * pi), 1e-14);
  EXPECT_NEAR(eigenvalue_asymptotic(cplx(std::sqrt(2.0), 2.0), 4), 9.0 * pi - 4.0 / (9.0 * pi * 2.0), 1e-13);
  // 1/S = -1: S = -1, e.g. V = 2 + 0i gives Im V - |V|^2/4 = -1.
  EXPECT_NEAR(eigenvalue_asymptotic(cplx(2.0, 0.0), 4), 7.0 * pi + 4.0 / (7.0 * pi), 1e-13);
  EXPECT_NEAR(eigenvalue_asymptotic(cplx(0.0, 4.0), 2), 3.0 * pi, 1e-15);
  EXPECT_THROW(eigenvalue_asymptotic(cplx(0.0, 2.0), 0), InputError);
}

TEST(EigenvalueAsymptotic, ThirdOrderGap) {
  for (cplx V : {cplx(0.0, 2.0), cplx(std::sqrt(2.0), 2.0), cplx(2.0, 0.0)}) {
    const auto r = eigenvalues_const(V, 0.5, 27.0 * pi);
    std::vector<double> scaled;
    const auto sc = spectral_characteristic(V);
    // For 0 < S < 1 the extra root lambda_0 in (0, pi) precedes lambda_1.
    const int offset = (sc.S > 0.0 && !sc.resonant) ? 0 : 1;
    for (int n = 3; n <= 12; ++n)
      scaled.push_back(std::abs(r[n - offset].lambda - eigenvalue_asymptotic(V, n)) * n * n * n);
    const auto [mn, mx] = std::minmax_element(scaled.begin(), scaled.end());
    EXPECT_LT(*mx / *mn, 3.0);
  }
}

// ------------------------------------------------------------------ two potentials

TEST(EigenvaluesGeneral, FreeOperator) {
  const auto r = eigenvalues_general(Potential::zero(), Potential::zero(), pi, 0.0, 20.0);
  ASSERT_EQ(r.size(), 3u);
  for (int n = 0; n < 3; ++n) EXPECT_NEAR(r[n].lambda, (2 * n + 1) * pi, 1e-14);
}

TEST(EigenvaluesGeneral, ReductionFamilyUsesConstantPath) {
  const auto g = eigenvalues_general(Potential::constant(I), Potential::constant(I * std::exp(-I * pi)), pi, -1.0, 12.0);
  const auto c = eigenvalues_const(cplx(0.0, 2.0), -1.0, 12.0);
  ASSERT_EQ(g.size(), c.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g[i].lambda, c[i].lambda);
    EXPECT_EQ(g[i].multiplicity, c[i].multiplicity);
  }
  // The discretization of the two-potential operator agrees.
  const auto d = discretize_interval(Potential::constant(I), Potential::constant(-I), pi, 1024);
  const auto ev = oracle_eigenvalues(d, -1.0, 12.0);
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_NEAR(ev[0], 0.0, 1e-3);
  EXPECT_NEAR(ev[1], 0.0, 1e-3);
  EXPECT_NEAR(ev[2], c[1].lambda, 1e-3);
}

TEST(EigenvaluesGeneral, SinglePotentialRootsAgreeWithThreeByThreeSystem) {
  const auto v = Potential::exp_decay(cplx(1.0, 0.5), 1.5, Domain::interval);
  const auto r = eigenvalues_general(v, Potential::zero(), 0.4, -20.0, 20.0);
  ASSERT_FALSE(r.empty());
  for (const auto& e : r) {
    EXPECT_EQ(e.method, "chi");
    const auto m = bvp_matrix(e.lambda, v, Potential::zero(), 0.4);
    const auto s = singular_values(m);
    EXPECT_LT(s(2) / s(0), 1e-10);
    EXPECT_LT(e.defect2, 1e-6);
  }
  const auto d = discretize_interval(v, Potential::zero(), 0.4, 1024);
  const auto ev = oracle_eigenvalues(d, -20.0, 20.0);
  ASSERT_EQ(ev.size(), r.size());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], r[i].lambda, 5e-3);
}

TEST(EigenvaluesGeneral, GenericPairValidatedByBoundaryValueResidual) {
  const auto v1 = Potential::constant(1.0), v2 = Potential::constant(0.5);
  const auto r = eigenvalues_general(v1, v2, pi / 2.0, -20.0, 20.0);
  ASSERT_FALSE(r.empty());
  const auto d = discretize_interval(v1, v2, pi / 2.0, 2048);
  const auto ev = oracle_eigenvalues(d, -20.0, 20.0);
  ASSERT_EQ(ev.size(), r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].method, "oracle+bvp");
    EXPECT_LT(r[i].defect1, 1e-10);
    EXPECT_LT(r[i].defect2, 1e-6);
    EXPECT_TRUE(r[i].chi_combined.has_value());
    EXPECT_NEAR(r[i].lambda, ev[i], 5e-3);
  }
}

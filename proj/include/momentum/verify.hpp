#pragma once
/**
 * @file verify.hpp
 * @brief Verification suites: each check measures one invariant and compares it to a threshold.
 */

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "checks.hpp"
#include "oracle.hpp"
#include "spectrum.hpp"

namespace momentum {

struct CheckLine {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

inline std::string format_double(double x, const char* fmt = "%.3e") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

inline std::string to_line(const CheckLine& c) {
  std::string s = std::string(c.pass ? "PASS " : "FAIL ") + c.name + "  measured=" + format_double(c.measured) +
                  " threshold=" + format_double(c.threshold);
  if (!c.note.empty()) s += "  " + c.note;
  return s;
}

/// measured < threshold
inline CheckLine below(std::string name, double measured, double threshold, std::string note = {}) {
  return {std::move(name), measured < threshold, measured, threshold, std::move(note)};
}

inline const std::vector<GammaVariant>& all_variants() {
  static const std::vector<GammaVariant> v{GammaVariant::axis_single_A, GammaVariant::axis_single_B,
                                           GammaVariant::axis_two, GammaVariant::interval_two,
                                           GammaVariant::interval_single_F};
  return v;
}

struct IdentityTolerances {
  double gamma_symmetry = 1e-11;
  double det_consistency = 1e-13;
  double swap = 1e-10;
  double rank = 1e-8;
  double c_matrix = 1e-12;
};

struct IdentityMaxima {
  double gamma_symmetry = 0.0, det_consistency = 0.0, swap = 0.0;
};

/// Gamma and kernel symmetry maxima over `cases` random operators of one variant.
inline IdentityMaxima symmetry_maxima(GammaVariant v, int cases, std::mt19937& rng) {
  IdentityMaxima m;
  for (int i = 0; i < cases; ++i) {
    const auto c = random_case(v, rng);
    const auto k = make_kernel(c);
    m.gamma_symmetry = std::max(m.gamma_symmetry, gamma_symmetry_defect(c));
    m.det_consistency = std::max(m.det_consistency, k.gamma.det_consistency());
    m.swap = std::max(m.swap, hermitian_swap_defect(k, sample_points(c, rng, 40)));
  }
  return m;
}

struct RankCheck {
  std::string label;
  int bound;
  double excess;  ///< sigma_{bound+1} / sigma_1
};

/// Rank bounds of kernel differences for one random operator per variant.
inline std::vector<RankCheck> rank_checks(std::mt19937& rng, int per_variant = 1) {
  std::vector<RankCheck> out;
  auto add = [&](std::string label, int r, const DifferenceSpectrum& s) {
    out.push_back({std::move(label), r, s.excess(r)});
  };
  for (int i = 0; i < per_variant; ++i)
    for (auto v : all_variants()) {
      const auto c = random_case(v, rng);
      const auto k = make_kernel(c);
      const bool axis = domain_of(v) == Domain::axis;
      const double lo = axis ? -1.5 : 0.0, hi = axis ? 2.5 : 1.0;
      const KernelFn base = [k](Point x, Point y) { return k.base_kernel(x, y); };
      add(std::string(to_string(v)) + " - base", 2, difference_spectrum(as_fn(k), base, lo, hi));
      if (v == GammaVariant::axis_two)
        add("axis-two - free", 3, difference_spectrum(as_fn(k), free_axis_kernel(c.z), lo, hi));
      if (v == GammaVariant::interval_two)
        add("interval base - free", 1,
            difference_spectrum(interval_base_kernel(c.z, c.alpha), free_axis_kernel(c.z), 0.0, 1.0));
    }
  return out;
}

/// Max first-column identity defect of the two-potential c-matrices over `cases` random z.
inline double c_matrix_max_defect(GammaVariant v, int cases, std::mt19937& rng) {
  double d = 0.0;
  for (int i = 0; i < cases; ++i) {
    const auto c = random_case(v, rng);
    const auto g = make_gamma(c);
    const auto m = c_matrix(g, c.alpha);
    d = std::max(d, c_matrix_column_defect(m, v, c.alpha) / std::max(1.0, m.cwiseAbs().maxCoeff()));
  }
  return d;
}

inline std::vector<CheckLine> identities_suite(int cases = 10, unsigned seed = 20240601, IdentityTolerances t = {}) {
  std::mt19937 rng(seed);
  std::vector<CheckLine> out;
  for (auto v : all_variants()) {
    const auto m = symmetry_maxima(v, cases, rng);
    const std::string n = to_string(v);
    out.push_back(below("gamma-symmetry " + n, m.gamma_symmetry, t.gamma_symmetry));
    out.push_back(below("det-consistency " + n, m.det_consistency, t.det_consistency));
    out.push_back(below("kernel-swap " + n, m.swap, t.swap));
  }
  for (const auto& r : rank_checks(rng))
    out.push_back(below("rank<=" + std::to_string(r.bound) + " " + r.label, r.excess, t.rank));
  for (auto v : {GammaVariant::axis_two, GammaVariant::interval_two})
    out.push_back(below(std::string("c-matrix-column ") + to_string(v), c_matrix_max_defect(v, cases, rng), t.c_matrix));
  return out;
}

struct ExampleTolerances {
  double defect = 1e-10;
  double location = 1e-8;
};

/// Axis scan for one example: the accepted list must equal `expected`.
inline std::vector<CheckLine> axis_example(const std::string& name, const Potential& v, BoundaryPhase a,
                                           const std::vector<double>& expected, ExampleTolerances t,
                                           double lo = -10.0, double hi = 10.0) {
  const auto found = axis_scan(v, a, lo, hi, 1e-3, t.defect);
  std::vector<CheckLine> out;
  double loc = found.size() == expected.size() ? 0.0 : inf, defect = 0.0;
  for (std::size_t i = 0; i < std::min(found.size(), expected.size()); ++i) loc = std::max(loc, std::abs(found[i].lambda - expected[i]));
  for (const auto& r : found) defect = std::max({defect, r.defect1, r.defect2});
  std::string list;
  for (const auto& r : found) list += (list.empty() ? "" : ",") + format_double(r.lambda, "%.12g");
  out.push_back(below(name + " eigenvalues", loc, t.location, "found={" + list + "}"));
  out.push_back(below(name + " condition-defects", defect, t.defect));
  return out;
}

inline std::vector<CheckLine> examples_suite(ExampleTolerances t = {}) {
  std::vector<CheckLine> out;
  auto append = [&](std::vector<CheckLine> v) { out.insert(out.end(), v.begin(), v.end()); };
  const double a = 0.9;
  const cplx k = 2.0 * I * std::polar(1.0, a);
  append(axis_example("example-constant-on-unit-interval", Potential::constant(k, 0.0, 1.0, Domain::axis), a, {0.0}, t));
  append(axis_example("example-exp-decay(gamma=0.5)", Potential::exp_decay(k, 0.5), a, {0.5}, t));
  append(axis_example("example-sign-exp", Potential::sign_exp(), 0.0, {-1.0, 1.0}, t));

  const auto res = eigenvalues_const(cplx(0.0, 2.0), -1.0, 12.0);
  const bool zero_double = !res.empty() && std::any_of(res.begin(), res.end(), [](const EigenResult& r) {
    return r.lambda == 0.0 && r.multiplicity == 2;
  });
  out.push_back({"resonance V=2i: lambda=0 with multiplicity 2", zero_double, zero_double ? 0.0 : 1.0, 0.5, ""});
  double s_err = std::abs(spectral_characteristic(cplx(0.0, 4.0)).S) + std::abs(spectral_characteristic(0.0).S) +
                 std::abs(spectral_characteristic(cplx(0.0, 2.0)).S - 1.0);
  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 3.0);
  double s_max = -inf;
  for (int i = 0; i < 10000; ++i) {
    const cplx V(g(rng), g(rng));
    const double S = spectral_characteristic(V).S;
    s_err = std::max(s_err, std::abs(S - (1.0 - 0.25 * std::norm(V - cplx(0.0, 2.0)))) / std::max(1.0, std::norm(V)));
    s_max = std::max(s_max, S);
  }
  out.push_back(below("S-identities (S(4i)=S(0)=0, S(2i)=1, completed square)", s_err, 1e-14));
  out.push_back({"S <= 1 on random V", s_max <= 1.0, s_max, 1.0, ""});
  return out;
}

/// Characteristic-function roots against the discretization at cells and 2*cells.
inline std::vector<CheckLine> oracle_suite(int cells = 1024, double tol = 5e-3) {
  std::vector<CheckLine> out;
  struct Case {
    std::string name;
    Potential v;
    BoundaryPhase a;
  };
  const std::vector<Case> cases{{"free alpha=pi", Potential::zero(), pi},
                                {"free alpha=0.7", Potential::zero(), 0.7},
                                {"const(1) alpha=pi", Potential::constant(1.0), pi},
                                {"const(4i) alpha=pi", Potential::constant(cplx(0.0, 4.0)), pi},
                                {"expdecay(1+0.5i,1.5) alpha=2", Potential::exp_decay(cplx(1.0, 0.5), 1.5, Domain::interval), 2.0}};
  for (const auto& c : cases) {
    std::vector<double> exact;
    for (const auto& r : eigenvalues_general(c.v, Potential::zero(), c.a, -15.0, 15.0)) exact.push_back(r.lambda);
    double errs[2] = {0.0, 0.0};
    bool count_ok = true;
    for (int i = 0; i < 2; ++i) {
      const auto ev = oracle_eigenvalues(discretize_interval(c.v, Potential::zero(), c.a, cells << i), -15.0, 15.0);
      count_ok = count_ok && ev.size() == exact.size();
      for (std::size_t j = 0; j < std::min(ev.size(), exact.size()); ++j) errs[i] = std::max(errs[i], std::abs(ev[j] - exact[j]));
    }
    const double order = errs[1] > 0.0 ? std::log2(errs[0] / errs[1]) : inf;
    auto line = below("oracle " + c.name, count_ok ? errs[1] : inf, tol,
                      "roots=" + std::to_string(exact.size()) + " err(N)=" + format_double(errs[0]) +
                          " err(2N)=" + format_double(errs[1]) + " order=" + format_double(order, "%.2f"));
    out.push_back(line);
  }
  return out;
}

}  // namespace momentum

// momentum-cli: eigenvalues, Green's functions, resolvent kernels, verification suites
// and the graphical-solution data for first-order momentum operators with nonlocal potentials.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure or a failing verification.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "momentum/checks.hpp"
#include "momentum/oracle.hpp"
#include "momentum/resolvent.hpp"
#include "momentum/spectrum.hpp"
#include "momentum/verify.hpp"

using namespace momentum;
using json = nlohmann::ordered_json;

namespace {

// ------------------------------------------------------------------ parsing

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* b = s.data() + (s[0] == '+' ? 1 : 0);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double require_number(const std::string& s, const std::string& what) {
  const auto v = parse_number(s);
  if (!v) throw InputError(what + ": not a number: '" + s + "'");
  return *v;
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; exponents such as `1e-3+2e-1i` are allowed.
cplx parse_complex(std::string s) {
  std::erase(s, ' ');
  const std::string orig = s;
  if (s.empty()) throw InputError("empty complex number");
  if (s.back() != 'i') return require_number(s, "complex number");
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  const auto r = re.empty() ? std::optional<double>(0.0) : parse_number(re);
  const auto m = parse_number(im);
  if (!r || !m) throw InputError("not a complex number: '" + orig + "'");
  return {*r, *m};
}

/// `pi`, `-pi`, `pi/2`, `3pi/4`, `2*pi`, or a plain number (radians).
double parse_alpha(std::string s) {
  std::erase(s, ' ');
  static const std::regex re(R"(^([+-]?)([0-9]*\.?[0-9]*)\*?pi(?:/([0-9]*\.?[0-9]+))?$)");
  std::smatch m;
  if (std::regex_match(s, m, re)) {
    double c = m[2].str().empty() ? 1.0 : require_number(m[2].str(), "alpha");
    if (m[1].str() == "-") c = -c;
    const double d = m[3].matched ? require_number(m[3].str(), "alpha") : 1.0;
    if (d == 0.0) throw InputError("alpha: division by zero");
    return c * pi / d;
  }
  return require_number(s, "alpha");
}

std::pair<double, double> parse_pair(const std::string& s, const std::string& what) {
  const auto c = s.find(',');
  if (c == std::string::npos) throw InputError(what + ": expected lo,hi");
  const double a = require_number(s.substr(0, c), what), b = require_number(s.substr(c + 1), what);
  if (!(a < b)) throw InputError(what + ": need lo < hi");
  return {a, b};
}

Potential read_sampled(const std::string& path, Domain d) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open potential file '" + path + "'");
  std::vector<double> x;
  std::vector<cplx> v;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string t; std::getline(ss, t, ',');) f.push_back(t);
    std::erase_if(f, [](std::string& t) { std::erase(t, ' '); return false; });
    const bool numeric = f.size() == 3 && parse_number(f[0]) && parse_number(f[1]) && parse_number(f[2]);
    if (!numeric) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw InputError("potential file '" + path + "': expected x,re,im in line '" + line + "'");
    }
    first = false;
    x.push_back(*parse_number(f[0]));
    v.emplace_back(*parse_number(f[1]), *parse_number(f[2]));
  }
  return Potential::sampled(std::move(x), std::move(v), d);
}

/// `zero`, `const:<c>[@a,b]`, `expdecay:k=<c>,gamma=<g>`, `signexp`, `sampled:<path>`.
Potential parse_potential(const std::string& s, Domain d) {
  if (s == "zero") return Potential::zero(d);
  if (s == "signexp") {
    if (d != Domain::axis) throw DomainMismatch("signexp is an axis potential");
    return Potential::sign_exp();
  }
  if (s.rfind("const:", 0) == 0) {
    const std::string body = s.substr(6);
    const auto at = body.find('@');
    const cplx c = parse_complex(body.substr(0, at));
    auto [a, b] = at == std::string::npos ? std::pair{0.0, 1.0} : parse_pair(body.substr(at + 1), "const support");
    if (d == Domain::interval && (a < 0.0 || b > 1.0)) throw DomainMismatch("const support must lie in [0, 1]");
    return Potential::constant(c, a, b, d);
  }
  if (s.rfind("expdecay:", 0) == 0) {
    std::optional<cplx> k;
    std::optional<double> g;
    std::stringstream ss(s.substr(9));
    for (std::string kv; std::getline(ss, kv, ',');) {
      const auto eq = kv.find('=');
      const std::string key = kv.substr(0, eq), val = eq == std::string::npos ? "" : kv.substr(eq + 1);
      if (key == "k") k = parse_complex(val);
      else if (key == "gamma") g = require_number(val, "expdecay gamma");
      else throw InputError("expdecay: unknown key '" + key + "'");
    }
    if (!k || !g) throw InputError("expdecay needs k=<complex>,gamma=<real>");
    return Potential::exp_decay(*k, *g, d);
  }
  if (s.rfind("sampled:", 0) == 0) return read_sampled(s.substr(8), d);
  throw InputError("unknown potential literal '" + s + "'");
}

Point parse_point(const std::string& s) {
  if (s == "-0") return minus0();
  if (s == "+0") return plus0();
  return Point(require_number(s, "point"));
}

// ------------------------------------------------------------------ output

/// Shortest round-trip representation; identical inputs give identical bytes.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json cjson(cplx c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

std::string cstr(cplx c) { return num(c.real()) + (std::signbit(c.imag()) ? "" : "+") + num(c.imag()) + "i"; }

/// Named tolerances of a command; `--tol` accepts `name=value` or a bare value for the first entry.
class Tolerances {
 public:
  Tolerances(std::vector<std::pair<std::string, double>> defaults) : t_(std::move(defaults)) {}  // NOLINT
  void apply(const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      const std::string key = eq == std::string::npos ? t_.front().first : o.substr(0, eq);
      const double v = require_number(eq == std::string::npos ? o : o.substr(eq + 1), "--tol");
      if (!(v > 0.0)) throw InputError("--tol values must be positive");
      auto it = std::find_if(t_.begin(), t_.end(), [&](const auto& p) { return p.first == key; });
      if (it == t_.end()) {
        std::string known;
        for (const auto& p : t_) known += " " + p.first;
        throw InputError("--tol: unknown tolerance '" + key + "' (known:" + known + ")");
      }
      it->second = v;
    }
  }
  double operator[](const std::string& k) const {
    for (const auto& p : t_)
      if (p.first == k) return p.second;
    throw std::logic_error("tolerance " + k);
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : t_) j[k] = v;
    return j;
  }
  std::string header() const {
    std::string s;
    for (const auto& [k, v] : t_) s += "# tol." + k + "=" + num(v) + "\n";
    return s;
  }

 private:
  std::vector<std::pair<std::string, double>> t_;
};

struct Global {
  std::string out;
  std::string format;
  std::vector<std::string> tol;
};

void emit(const Global& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw InputError("cannot write '" + g.out + "'");
  f << text;
}

std::string format_or(const Global& g, const std::string& def, std::initializer_list<const char*> allowed) {
  const std::string f = g.format.empty() ? def : g.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw InputError("--format " + f + " is not available for this command");
}

Domain parse_model(const std::string& m) {
  if (m == "axis") return Domain::axis;
  if (m == "interval") return Domain::interval;
  throw InputError("--model must be axis or interval");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return x;
}

// ------------------------------------------------------------------ eigen

struct EigenArgs {
  std::string model, alpha = "0", v1 = "zero", v2, range;
  double step = 1e-3;
  int cells = 1024, samples = 101;
  double span = 10.0;
};

int cmd_eigen(const Global& g, const EigenArgs& a) {
  const Domain d = parse_model(a.model);
  const double alpha = parse_alpha(a.alpha);
  const auto [lo, hi] = parse_pair(a.range, "--range");
  const Potential v1 = parse_potential(a.v1, d);
  if (d == Domain::axis && !a.v2.empty()) throw InputError("the axis model takes a single potential (--v1)");
  const Potential v2 = a.v2.empty() ? Potential::zero(d) : parse_potential(a.v2, d);
  if (!(a.step > 0.0)) throw InputError("--step must be positive");
  if (a.samples < 2) throw InputError("--samples must be at least 2");
  Tolerances tol({{"accept", 1e-10}});
  tol.apply(g.tol);
  const std::string fmt = format_or(g, "json", {"json", "csv"});

  const auto res = d == Domain::axis ? axis_scan(v1, alpha, lo, hi, a.step, tol["accept"])
                                     : eigenvalues_general(v1, v2, alpha, lo, hi, a.cells);

  if (fmt == "csv") {
    std::string s = "# schema=1\n# command=eigen\n# model=" + a.model + "\n# alpha=" + num(alpha) + "\n" + tol.header();
    s += "index,lambda,multiplicity,function,x,re,im\n";
    const auto xs = d == Domain::interval ? linspace(0.0, 1.0, a.samples) : linspace(-a.span, a.span, a.samples);
    for (std::size_t i = 0; i < res.size(); ++i)
      for (std::size_t f = 0; f < res[i].eigenfunctions.size(); ++f)
        for (double x : xs) {
          const cplx y = res[i].eigenfunctions[f](x);
          s += std::to_string(i) + "," + num(res[i].lambda) + "," + std::to_string(res[i].multiplicity) + "," +
               std::to_string(f) + "," + num(x) + "," + num(y.real()) + "," + num(y.imag()) + "\n";
        }
    emit(g, s);
    return 0;
  }
  json j{{"schema", 1}, {"command", "eigen"}, {"model", a.model}, {"alpha", alpha}, {"v1", a.v1},
         {"v2", a.v2.empty() ? json(nullptr) : json(a.v2)}, {"range", {lo, hi}}, {"tolerance", tol.to_json()}};
  json list = json::array();
  for (const auto& r : res) {
    json e{{"lambda", r.lambda}, {"multiplicity", r.multiplicity}, {"residuals", {r.defect1, r.defect2}},
           {"method", r.method}};
    if (r.chi_combined) e["chi_combined"] = cjson(*r.chi_combined);
    list.push_back(e);
  }
  j["eigenvalues"] = list;
  emit(g, j.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ greens

struct GreensArgs {
  std::string model, z, x, y, alpha = "0", kind = "free";
};

int cmd_greens(const Global& g, const GreensArgs& a) {
  const Domain d = parse_model(a.model);
  const SpectralPoint zp(parse_complex(a.z));
  const double alpha = parse_alpha(a.alpha);
  const Point x = parse_point(a.x);
  std::optional<Point> y;
  if (!a.y.empty()) y = parse_point(a.y);
  Tolerances tol({{"none", 0.0}});
  const std::string fmt = format_or(g, "json", {"json", "csv"});
  cplx value;
  if (d == Domain::axis) {
    if (a.kind == "free") value = y ? g_axis(zp, difference(x, *y)) : g_axis(zp, x);
    else if (a.kind == "point") value = G_point(zp, x, y.value_or(Point(0.0)), alpha);
    else throw InputError("--kind must be free or point");
  } else {
    if (x.x < 0.0 || x.x > 1.0 || (y && (y->x < 0.0 || y->x > 1.0))) throw DomainMismatch("interval points lie in [0, 1]");
    value = g_interval(zp.z(), x.x, y.value_or(Point(0.0)).x, alpha);
  }
  if (fmt == "csv") {
    emit(g, "# schema=1\n# command=greens\nmodel,kind,z,x,y,alpha,re,im\n" + a.model + "," + a.kind + "," +
                cstr(zp.z()) + "," + a.x + "," + (a.y.empty() ? std::string("0") : a.y) + "," + num(alpha) + "," +
                num(value.real()) + "," + num(value.imag()) + "\n");
    return 0;
  }
  json j{{"schema", 1}, {"command", "greens"}, {"model", a.model}, {"kind", d == Domain::axis ? a.kind : "interval"},
         {"z", cjson(zp.z())}, {"x", a.x}, {"y", a.y.empty() ? json(nullptr) : json(a.y)}, {"alpha", alpha},
         {"value", cjson(value)}};
  emit(g, j.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ kernel / resolvent-apply

struct KernelArgs {
  std::string model, variant, z, alpha = "0", v1 = "zero", v2 = "zero", h = "const:1@0,1";
  int grid = 32;
  std::optional<double> lo, hi;
};

GammaVariant parse_variant(const std::string& s, Domain d) {
  if (d == Domain::axis) {
    if (s.empty() || s == "A") return GammaVariant::axis_single_A;
    if (s == "B") return GammaVariant::axis_single_B;
    if (s == "two") return GammaVariant::axis_two;
  } else {
    if (s.empty() || s == "two") return GammaVariant::interval_two;
    if (s == "F") return GammaVariant::interval_single_F;
  }
  throw InputError("--variant '" + s + "' is not available for model " + to_string(d));
}

OperatorCase operator_case(const KernelArgs& a, Domain d) {
  const GammaVariant v = parse_variant(a.variant, d);
  const bool two = v == GammaVariant::axis_two || v == GammaVariant::interval_two;
  if (!two && a.v2 != "zero") throw InputError("--v2 needs a two-potential variant");
  const cplx z = parse_complex(a.z);
  SpectralPoint{z};  // validates Im z != 0
  return {v, z, parse_potential(a.v1, d), parse_potential(a.v2, d), parse_alpha(a.alpha)};
}

std::string case_header(const std::string& cmd, const KernelArgs& a, const OperatorCase& c) {
  return "# schema=1\n# command=" + cmd + "\n# model=" + a.model + "\n# variant=" + to_string(c.variant) +
         "\n# z=" + cstr(c.z) + "\n# alpha=" + num(c.alpha.value()) + "\n# v1=" + a.v1 + "\n# v2=" + a.v2 + "\n";
}

int cmd_kernel(const Global& g, const KernelArgs& a) {
  const Domain d = parse_model(a.model);
  const auto c = operator_case(a, d);
  if (a.grid < 2 || a.grid > 2000) throw InputError("--grid must be in [2, 2000]");
  const double lo = a.lo.value_or(d == Domain::axis ? -1.5 : 0.0), hi = a.hi.value_or(d == Domain::axis ? 2.5 : 1.0);
  if (!(lo < hi)) throw InputError("need --lo < --hi");
  if (d == Domain::interval && (lo < 0.0 || hi > 1.0)) throw DomainMismatch("interval kernel lives on [0, 1]");
  Tolerances tol({{"rank", 1e-8}});
  tol.apply(g.tol);
  const std::string fmt = format_or(g, "csv", {"csv", "json"});
  const auto k = make_kernel(c);
  const KernelFn base = [k](Point x, Point y) { return k.base_kernel(x, y); };
  const auto s_base = difference_spectrum(as_fn(k), base, lo, hi, a.grid);
  const auto s_free = difference_spectrum(as_fn(k), free_axis_kernel(c.z), lo, hi, a.grid);
  const int r_base = s_base.rank(tol["rank"]), r_free = s_free.rank(tol["rank"]);
  const auto xs = [&] {
    std::vector<double> x;
    for (int i = 0; i < a.grid; ++i) x.push_back(lo + (hi - lo) * (i + 0.5) / a.grid);
    return x;
  }();
  if (fmt == "json") {
    json vals = json::array();
    for (double x : xs)
      for (double y : xs) {
        const cplx v = k(Point(x), Point(y));
        vals.push_back({x, y, v.real(), v.imag()});
      }
    json j{{"schema", 1}, {"command", "kernel"}, {"model", a.model}, {"variant", to_string(c.variant)},
           {"z", cjson(c.z)}, {"alpha", c.alpha.value()}, {"grid", a.grid}, {"gamma_det", cjson(k.gamma.det)},
           {"rank_minus_base", r_base}, {"rank_minus_free", r_free}, {"tolerance", tol.to_json()},
           {"samples", vals}};
    emit(g, j.dump(1) + "\n");
    return 0;
  }
  std::string s = case_header("kernel", a, c);
  s += "# grid=" + std::to_string(a.grid) + " on [" + num(lo) + "," + num(hi) + "]^2 (cell centers)\n";
  s += "# gamma_det=" + cstr(k.gamma.det) + "\n";
  s += "# rank(K - base)=" + std::to_string(r_base) + "\n# rank(K - free)=" + std::to_string(r_free) + "\n";
  s += tol.header();
  s += "x,y,re,im\n";
  for (double x : xs)
    for (double y : xs) {
      const cplx v = k(Point(x), Point(y));
      s += num(x) + "," + num(y) + "," + num(v.real()) + "," + num(v.imag()) + "\n";
    }
  emit(g, s);
  return 0;
}

int cmd_resolvent_apply(const Global& g, const KernelArgs& a) {
  const Domain d = parse_model(a.model);
  const auto c = operator_case(a, d);
  const Potential h = parse_potential(a.h, d);
  if (a.grid < 2) throw InputError("--grid must be at least 2");
  const double lo = a.lo.value_or(d == Domain::axis ? -3.0 : 0.0), hi = a.hi.value_or(d == Domain::axis ? 4.0 : 1.0);
  if (!(lo < hi)) throw InputError("need --lo < --hi");
  Tolerances tol({{"ode", 1e-6}, {"bc", 1e-8}});
  tol.apply(g.tol);
  const std::string fmt = format_or(g, "csv", {"csv", "json"});
  const auto k = make_kernel(c);
  const auto xs = linspace(lo, hi, a.grid);
  const auto sol = apply_resolvent(k, h, xs);
  std::vector<double> check;
  for (int i = 0; i < 1000; ++i) check.push_back(lo + (hi - lo) * (i + 0.5) / 1000);
  const auto r = check_resolvent_solution(k, sol.psi, h, check);
  const bool ok = r.ode_max < tol["ode"] && r.bc < tol["bc"];
  if (fmt == "json") {
    json vals = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) vals.push_back({xs[i], sol.values[i].real(), sol.values[i].imag()});
    json j{{"schema", 1}, {"command", "resolvent-apply"}, {"model", a.model}, {"variant", to_string(c.variant)},
           {"z", cjson(c.z)}, {"alpha", c.alpha.value()}, {"h", a.h}, {"ode_residual", r.ode_max},
           {"bc_residual", r.bc}, {"within_tolerance", ok}, {"tolerance", tol.to_json()}, {"psi", vals}};
    emit(g, j.dump(1) + "\n");
  } else {
    std::string s = case_header("resolvent-apply", a, c) + "# h=" + a.h + "\n";
    s += "# ode_residual=" + num(r.ode_max) + "\n# bc_residual=" + num(r.bc) + "\n" + tol.header();
    s += "x,re,im\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      s += num(xs[i]) + "," + num(sol.values[i].real()) + "," + num(sol.values[i].imag()) + "\n";
    emit(g, s);
  }
  return ok ? 0 : 3;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string suite = "all";
  int cases = 10;
  int cells = 1024;
};

int cmd_verify(const Global& g, const VerifyArgs& a) {
  if (a.suite != "identities" && a.suite != "examples" && a.suite != "oracle" && a.suite != "all")
    throw InputError("--suite must be identities, examples, oracle or all");
  if (a.cases < 1) throw InputError("--cases must be positive");
  if (a.cells < 64) throw InputError("--cells must be at least 64");
  Tolerances tol({{"gamma_symmetry", 1e-11}, {"det_consistency", 1e-13}, {"swap", 1e-10}, {"rank", 1e-8},
                  {"c_matrix", 1e-12}, {"defect", 1e-10}, {"location", 1e-8}, {"oracle", 5e-3}});
  tol.apply(g.tol);
  const std::string fmt = format_or(g, "text", {"text", "json"});
  std::vector<std::pair<std::string, std::vector<CheckLine>>> parts;
  const bool all = a.suite == "all";
  if (all || a.suite == "identities")
    parts.emplace_back("identities", identities_suite(a.cases, 20240601,
                                                      {tol["gamma_symmetry"], tol["det_consistency"], tol["swap"],
                                                       tol["rank"], tol["c_matrix"]}));
  if (all || a.suite == "examples") parts.emplace_back("examples", examples_suite({tol["defect"], tol["location"]}));
  if (all || a.suite == "oracle") parts.emplace_back("oracle", oracle_suite(a.cells, tol["oracle"]));
  bool pass = true;
  for (const auto& [n, lines] : parts)
    for (const auto& l : lines) pass = pass && l.pass;
  if (fmt == "json") {
    json j{{"schema", 1}, {"command", "verify"}, {"suite", a.suite}, {"tolerance", tol.to_json()}};
    json suites = json::object();
    for (const auto& [n, lines] : parts) {
      json arr = json::array();
      for (const auto& l : lines)
        arr.push_back({{"name", l.name}, {"pass", l.pass}, {"measured", l.measured}, {"threshold", l.threshold},
                       {"note", l.note}});
      suites[n] = arr;
    }
    j["suites"] = suites;
    j["pass"] = pass;
    emit(g, j.dump(2) + "\n");
  } else {
    std::string s;
    for (const auto& [n, lines] : parts) {
      s += "[" + n + "]\n";
      for (const auto& l : lines) s += to_line(l) + "\n";
    }
    s += pass ? "ALL PASS\n" : "SOME CHECKS FAILED\n";
    emit(g, s);
  }
  return pass ? 0 : 3;
}

// ------------------------------------------------------------------ figure1

struct FigureArgs {
  std::string V, xi_range = "-10,10";
  int samples = 2001;
};

int cmd_figure1(const Global& g, const FigureArgs& a) {
  const cplx V = parse_complex(a.V);
  const auto [lo, hi] = parse_pair(a.xi_range, "--xi-range");
  if (a.samples < 2) throw InputError("--samples must be at least 2");
  Tolerances tol({{"pole", 1e-9}});
  tol.apply(g.tol);
  const std::string fmt = format_or(g, "csv", {"csv", "json"});
  const auto sc = spectral_characteristic(V);
  const bool lattice = std::abs(sc.S) <= 1e-12;
  std::vector<double> xi;
  if (lattice) {
    // 1/S is at infinity: the solutions sit on the poles xi = 2(2n - 1).
    for (double p = 2.0 + 4.0 * std::ceil((lo - 2.0) / 4.0); p <= hi; p += 4.0) xi.push_back(p);
  } else {
    xi = figure_intersections(V, lo, hi);
  }
  std::vector<std::pair<double, double>> curve;
  for (double x : linspace(lo, hi, a.samples)) {
    const double k = std::round((x - 2.0) / 4.0);
    if (std::abs(x - (2.0 + 4.0 * k)) <= tol["pole"]) continue;
    curve.emplace_back(x, F(x));
  }
  const double line = lattice ? inf : 1.0 / sc.S;
  if (fmt == "json") {
    json c = json::array(), in = json::array();
    for (const auto& [x, f] : curve) c.push_back({x, f});
    for (double x : xi) in.push_back({{"xi", x}, {"lambda", 0.5 * pi * x}});
    json j{{"schema", 1}, {"command", "figure1"}, {"V", cjson(V)}, {"S", sc.S}, {"resonant", sc.resonant},
           {"line", lattice ? json(nullptr) : json(line)}, {"lattice", lattice}, {"xi_range", {lo, hi}},
           {"tolerance", tol.to_json()}, {"curve", c}, {"intersections", in}};
    emit(g, j.dump(1) + "\n");
    return 0;
  }
  std::string s = "# schema=1\n# command=figure1\n# V=" + cstr(V) + "\n# S=" + num(sc.S) + "\n";
  s += lattice ? "# line=none (S=0): lattice xi=2(2n-1) reported as intersections\n" : "# line=" + num(line) + "\n";
  s += "# resonant=" + std::string(sc.resonant ? "true" : "false") + "\n" + tol.header();
  s += "kind,xi,value\n";
  for (const auto& [x, f] : curve) s += "curve," + num(x) + "," + num(f) + "\n";
  if (!lattice) {
    s += "line," + num(lo) + "," + num(line) + "\n";
    s += "line," + num(hi) + "," + num(line) + "\n";
  }
  for (double x : xi) s += "intersection," + num(x) + "," + num(0.5 * pi * x) + "\n";
  emit(g, s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolvents and spectra of momentum operators with nonlocal potentials"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--out", g.out, "write output to this file instead of stdout");
  app.add_option("--format", g.format, "output format: json, csv (verify: text, json)");
  app.add_option("--tol", g.tol, "tolerance override: name=value, or a value for the primary tolerance")
      ->allow_extra_args(false);

  EigenArgs ea;
  auto* eigen = app.add_subcommand("eigen", "eigenvalues of the axis or interval operator");
  eigen->add_option("--model", ea.model)->required();
  eigen->add_option("--alpha", ea.alpha, "boundary phase (pi, pi/2, 1.3, ...)");
  eigen->add_option("--v1", ea.v1, "potential literal");
  eigen->add_option("--v2", ea.v2, "second potential (interval only)");
  eigen->add_option("--range", ea.range, "lo,hi")->required();
  eigen->add_option("--step", ea.step, "axis scan step");
  eigen->add_option("--cells", ea.cells, "discretization cells seeding the general interval solver");
  eigen->add_option("--samples", ea.samples, "eigenfunction samples (csv)");
  eigen->add_option("--span", ea.span, "axis eigenfunction sampling half-width (csv)");

  GreensArgs ga;
  auto* greens = app.add_subcommand("greens", "unperturbed Green's function values");
  greens->add_option("--model", ga.model)->required();
  greens->add_option("--z", ga.z)->required();
  greens->add_option("--x", ga.x, "point; -0 and +0 select one-sided limits")->required();
  greens->add_option("--y", ga.y);
  greens->add_option("--alpha", ga.alpha);
  greens->add_option("--kind", ga.kind, "axis: free or point");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "resolvent kernel on a grid, with rank reports");
  KernelArgs ra;
  auto* rapply = app.add_subcommand("resolvent-apply", "apply the resolvent to a right-hand side");
  for (auto [cmd, args] : {std::pair{kernel, &ka}, std::pair{rapply, &ra}}) {
    cmd->add_option("--model", args->model)->required();
    cmd->add_option("--variant", args->variant, "axis: A, B, two; interval: two, F");
    cmd->add_option("--z", args->z)->required();
    cmd->add_option("--alpha", args->alpha);
    cmd->add_option("--v1", args->v1);
    cmd->add_option("--v2", args->v2);
    cmd->add_option("--grid", args->grid, "grid points per axis");
    cmd->add_option("--lo", args->lo);
    cmd->add_option("--hi", args->hi);
  }
  ra.grid = 201;
  rapply->add_option("--rhs", ra.h, "right-hand side potential literal");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", va.suite, "identities, examples, oracle, all");
  verify->add_option("--cases", va.cases, "random operators per variant");
  verify->add_option("--cells", va.cells, "discretization cells for the oracle suite");

  FigureArgs fa;
  auto* figure = app.add_subcommand("figure1", "graphical solution of the constant-potential equation");
  figure->add_option("--V", fa.V)->required();
  figure->add_option("--xi-range", fa.xi_range, "lo,hi");
  figure->add_option("--samples", fa.samples);

  for (auto* s : {eigen, greens, kernel, rapply, verify, figure}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (*eigen) return cmd_eigen(g, ea);
    if (*greens) return cmd_greens(g, ga);
    if (*kernel) return cmd_kernel(g, ka);
    if (*rapply) return cmd_resolvent_apply(g, ra);
    if (*verify) return cmd_verify(g, va);
    if (*figure) return cmd_figure1(g, fa);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

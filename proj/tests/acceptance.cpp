// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [UNIT_TESTS_BINARY]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "fdchk/criterion.hpp"
#include "fdchk/pde.hpp"

using namespace fdchk;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> log_samples(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return out;
}

MatrixField identity2() { return MatrixField::constant(ComplexMatrix::identity(2)); }
AuxBundle flat() { return AuxBundle(make_builtin("power", {{"p", 2.0}})); }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome lambda0_table() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (double p : {1.5, 2.0, 3.0, 4.0, 10.0}) {
    const double v = lambda0_search(make_builtin("power", {{"p", p}})).value;
    const double want = std::abs(p - 2) / (2 * std::sqrt(p - 1));
    o.require(std::abs(v - want) <= 1e-6, fmt("power(%g) = %.9g, want %.9g", p, v, want));
  }
  const double r4 = lambda0_search(make_builtin("ratio4")).value;
  o.require(std::abs(r4 - 1 / std::sqrt(3.0)) <= 1e-6, fmt("ratio4 = %.9g", r4));
  const double rl = lambda0_search(make_builtin("ratio_log")).value;
  o.require(std::abs(rl - 2 / std::sqrt(5.0)) <= 1e-6, fmt("ratio_log = %.9g", rl));
  for (const auto& spec : {make_builtin("exp_power", {{"p", 1.0}}), make_builtin("exp_power", {{"p", 2.0}}),
                           make_builtin("arctan_def")})
    o.require(!lambda0_search(spec).finite(), spec.label() + " not flagged infinite");
  const PhiSpec zyg = make_builtin("zygmund", {{"p", 3.0}});
  const auto tails = lambda0_tail_limits(zyg);
  const double end = 1 / (2 * std::sqrt(2.0));
  o.require(lambda0_search(zyg).finite(), "zygmund not finite");
  o.require(std::abs(tails.at_zero - end) <= 1e-4 && std::abs(tails.at_infinity - end) <= 1e-4,
            fmt("zygmund tails %.6g, %.6g", tails.at_zero, tails.at_infinity));
  const double secs = elapsed(t0);
  o.require(secs < 5.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("ratio4 %.9f, ratio_log %.9f, %.2f s", r4, rl, secs);
  return o;
}

Outcome lambda_constancy() {
  Outcome o;
  double worst = 0;
  for (double p : {1.5, 3.0, 4.0})
    for (double c : {1.0, p}) {
      const AuxBundle aux(make_builtin("power", {{"p", p}, {"c", c}}));
      for (double t : log_samples(1e-6, 1e6, 1000)) worst = std::max(worst, std::abs(aux.lambda(t) + (1 - 2 / p)));
    }
  o.require(worst <= 1e-10, fmt("max deviation %.3g", worst));
  if (o.pass) o.detail = fmt("max deviation %.3g", worst);
  return o;
}

Outcome duality() {
  Outcome o;
  double worst = 0;
  // Builtins whose ψ stays finite on the sampled range; exp_power and arctan
  // saturate or overflow in double precision.
  for (const auto& spec : {make_builtin("power", {{"p", 1.5}}), make_builtin("power", {{"p", 3.0}}),
                           make_builtin("power", {{"p", 4.0}, {"c", 4.0}}), make_builtin("zygmund", {{"p", 3.0}}),
                           make_builtin("ratio4"), make_builtin("ratio_log")}) {
    const AuxBundle aux(spec);
    for (double t : log_samples(1e-6, 1e6, 1000)) {
      const auto [prod, sum] = duality_check(aux, t);
      worst = std::max({worst, std::abs(prod - 1), std::abs(sum)});
    }
  }
  o.require(worst <= 1e-6, fmt("max deviation %.3g", worst));
  if (o.pass) o.detail = fmt("max deviation %.3g over 6 weights", worst);
  return o;
}

ComplexMatrix random_symmetric_im(std::mt19937_64& rng, std::size_t n, double im_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealMatrix b(n), re(n), im(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = u(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) re(i, j) += b(k, i) * b(k, j);
      if (i == j) re(i, j) += 0.1;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) im(i, j) = im(j, i) = im_scale * u(rng);
  return {re, im};
}

Outcome equivalence() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  const SampleSpec spec;
  int disagreements = 0, dissipative = 0, total = 0;
  for (const auto& phi : {make_builtin("power", {{"p", 3.0}}), make_builtin("power", {{"p", 4.0}}),
                          make_builtin("ratio4"), make_builtin("ratio_log")}) {
    const AuxBundle aux(phi);
    const auto lams = lambda_samples(aux, spec);
    for (int k = 0; k < 1000; ++k) {
      const ComplexMatrix a = random_symmetric_im(rng, k % 2 ? 3 : 2, 0.25 + 0.5 * (k % 4));
      double form = INFINITY;
      for (const auto& l : lams) form = std::min(form, form_min_eig(a, l.value));
      const bool crit = check_pointwise(MatrixField::constant(a), aux, spec).verdict == Verdict::dissipative;
      disagreements += crit != (form >= -1e-6);
      dissipative += crit;
      ++total;
    }
  }
  o.require(disagreements == 0, fmt("%d disagreements of %d", disagreements, total));
  o.require(dissipative > 0 && dissipative < total, "samples not mixed");
  if (o.pass) o.detail = fmt("%d cases, %d dissipative, 0 disagreements", total, dissipative);
  return o;
}

Outcome constant_skew() {
  Outcome o;
  for (double g : {0.5, 1.0, 2.0}) {
    const double v = form_min_eig(ComplexMatrix(2, {1.0, g * I, -g * I, 1.0}), 0.0);
    o.require(std::abs(v - (1 - g)) <= 1e-9, fmt("gamma %g: %.12g", g, v));
  }
  const auto skew = MatrixField::constant(ComplexMatrix(2, {1.0, 2.0 * I, -2.0 * I, 1.0}));
  const auto d = GridDomain::unit_square(64);
  std::mt19937_64 rng(51);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    double c[3][3];
    for (auto& row : c)
      for (double& v : row) v = nd(rng);
    const auto u = GridField::from_function(d, [&](double x, double y) {
      double s = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += c[i][j] * std::sin((i + 1) * pi * x) * std::sin((j + 1) * pi * y);
      return cplx(s * (1 + x * y));
    });
    const double base = dissipativity_integral(identity2(), u, flat());
    worst = std::max(worst, std::abs(dissipativity_integral(skew, u, flat()) - base) / std::abs(base));
  }
  o.require(worst <= 1e-10, fmt("relative gap %.3g", worst));
  if (o.pass) o.detail = fmt("form minima 1-|gamma|, integral relative gap %.3g", worst);
  return o;
}

Outcome linear_skew_refutation() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = MatrixField::parse(2, {{{"1", "0"}, {"0", "9*x1"}}, {{"0", "-9*x1"}, {"1", "0"}}});
  const auto d = GridDomain::unit_square(128);
  const auto u = GridField::from_function(
      d, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y) * std::polar(1.0, -4.5 * y); });
  // The integral is Re∫⟨A∇u,∇u⟩ = π²/2 − 81/16 < 0; its negative is the violation.
  const double exact = pi * pi / 2 - 81.0 / 16.0;
  const double v = dissipativity_integral(a, u, flat());
  const double rel = std::abs(v - exact) / std::abs(exact);
  const double secs = elapsed(t0);
  o.require(v < 0 && rel <= 0.02, fmt("integral %.6f vs %.6f (%.2f%%)", v, exact, 100 * rel));
  o.require(secs < 10.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("violation %.6f vs %.6f (%.2f%%), %.2f s", -v, -exact, 100 * rel, secs);
  return o;
}

Outcome sharpness() {
  Outcome o;
  const AuxBundle ratio4(make_builtin("ratio4"));
  auto pair = [](double b) { return MatrixField::constant(ComplexMatrix(2, {1.0, b * I, b * I, 1.0})); };
  const auto lo = check_operator(pair(1.7), ratio4);
  const auto hi = check_operator(pair(1.8), ratio4);
  o.require(lo.verdict == Verdict::dissipative, "b = 1.7 gives " + std::string(to_string(lo.verdict)));
  o.require(hi.verdict == Verdict::not_dissipative && hi.witness.has_value(),
            "b = 1.8 gives " + std::string(to_string(hi.verdict)));
  ProbeOptions opt;
  opt.family = ProbeKind::log_phase;
  opt.budget = 5000;
  opt.seed = 7;
  const auto res = probe_search(pair(3.0), ratio4, GridDomain::unit_square(64), opt);
  o.require(res.best_value > 0 && res.certified, fmt("b = 3 probe best %.3g", res.best_value));
  if (o.pass)
    o.detail = fmt("b=1.7 dissipative, b=1.8 not_dissipative, b=3 probe %.3g (scale %.3g)", res.best_value,
                   res.scale);
  return o;
}

Outcome semigroup() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = GridDomain::unit_square(64);
  const auto u0 = GridField::from_function(d, [](double x, double y) { return cplx(std::sin(pi * x) * std::sin(pi * y)); });
  const double dt = 1e-3;
  double worst_inc = -INFINITY, worst_l2 = 0;
  for (const auto& spec : {make_builtin("power", {{"p", 2.0}, {"c", 2.0}}), make_builtin("power", {{"p", 4.0}}),
                           make_builtin("ratio4")}) {
    const auto tr = evolve(identity2(), AuxBundle(spec), u0, dt, 200);
    for (std::size_t n = 1; n < tr.orlicz.size(); ++n) worst_inc = std::max(worst_inc, tr.orlicz[n] - tr.orlicz[n - 1]);
    for (std::size_t n = 0; n < tr.l2.size(); ++n)
      worst_l2 = std::max(worst_l2, std::abs(tr.l2[n] / (tr.l2[0] * std::pow(1 + dt * 2 * pi * pi, -double(n))) - 1));
  }
  const double secs = elapsed(t0);
  o.require(worst_inc <= 1e-12, fmt("Orlicz integral grew by %.3g", worst_inc));
  o.require(worst_l2 <= 1e-3, fmt("L2 decay off by %.3g", worst_l2));
  o.require(secs < 30.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("max step change %.3g, L2 decay error %.3g, %.1f s", worst_inc, worst_l2, secs);
  return o;
}

Outcome substitution() {
  Outcome o;
  const auto a = MatrixField::constant(ComplexMatrix(2, {1.0, 0.5 * I, 0.5 * I, cplx(1.0, 0.2)}));
  std::string ratios;
  for (const auto& spec : {make_builtin("power", {{"p", 4.0}}), make_builtin("ratio4")}) {
    const AuxBundle aux(spec);
    double gap[2];
    for (int k = 0; k < 2; ++k) {
      const auto d = GridDomain::unit_square(64 << k);
      const auto u = GridField::from_function(d, [](double x, double y) {
        return (1 + x) * std::sin(pi * x) * std::sin(pi * y) * std::polar(1.0, 3 * y);
      });
      gap[k] = std::abs(dissipativity_integral(a, u, aux) - form_integral_v(a, sqrt_phi_times(aux, u), aux));
    }
    o.require(gap[1] <= 0.5 * gap[0], fmt("%s gaps %.3g, %.3g", spec.label().c_str(), gap[0], gap[1]));
    ratios += fmt("%s%s %.2f", ratios.empty() ? "" : ", ", spec.label().c_str(), gap[0] / gap[1]);
  }
  if (o.pass) o.detail = "gap ratios 64/128: " + ratios;
  return o;
}

Outcome property_suites(const char* unit_tests) {
  Outcome o;
  if (!unit_tests) {
    o.require(false, "unit test binary not given");
    return o;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = std::string("\"") + unit_tests + "\" --minimal > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  const double secs = elapsed(t0);
  o.require(rc == 0, fmt("unit tests exited with %d", rc));
  o.require(secs < 180.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("all unit tests pass in %.1f s", secs);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const char* unit_tests = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"lambda0 reproduction table", lambda0_table},
      {"Lambda constant for powers", lambda_constancy},
      {"duality of Theta and Lambda", duality},
      {"criterion and form test agree", equivalence},
      {"constant Hermitian skew part", constant_skew},
      {"linear skew refutation", linear_skew_refutation},
      {"boundary sharpness for ratio4", sharpness},
      {"semigroup decay", semigroup},
      {"substitution identity converges", substitution},
      {"property suites", [&] { return property_suites(unit_tests); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

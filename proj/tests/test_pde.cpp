#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fdchk/criterion.hpp"
#include "fdchk/errors.hpp"
#include "fdchk/pde.hpp"

using namespace fdchk;
using std::numbers::pi;

namespace {

// Oracles: analytic Dirichlet energies, the linear skew optimum, the scalar
// eigenmode ODE and the continuous symbol of Δ + 2iβ∂₁∂₂.

const cplx I{0.0, 1.0};

MatrixField identity2() { return MatrixField::constant(ComplexMatrix::identity(2)); }
AuxBundle flat() { return AuxBundle(make_builtin("power", {{"p", 2.0}})); }

GridField mode(const GridDomain& d) {
  return GridField::from_function(d, [](double x, double y) { return cplx(std::sin(pi * x) * std::sin(pi * y)); });
}

MatrixField linear_skew() { return MatrixField::parse(2, {{{"1", "0"}, {"0", "9*x1"}}, {{"0", "-9*x1"}, {"1", "0"}}}); }

GridField linear_skew_probe(const GridDomain& d) {
  return GridField::from_function(
      d, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y) * std::polar(1.0, -4.5 * y); });
}

GridField smooth_field(const GridDomain& d) {
  return GridField::from_function(d, [](double x, double y) {
    return (1 + x) * std::sin(pi * x) * std::sin(pi * y) * std::polar(1.0, 3 * y);
  });
}

GridField random_real(const GridDomain& d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridField u = GridField::zeros(d);
  // Smooth random combination of sine modes.
  double c[4][4];
  for (auto& row : c)
    for (double& v : row) v = nd(rng);
  for (std::size_t m = 0; m < d.size(); ++m) {
    const auto [x, y] = d.coord(m);
    double s = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += c[i][j] * std::sin((i + 1) * pi * x) * std::sin((j + 1) * pi * y);
    u.values[m] = s;
  }
  return u;
}

std::vector<cplx> apply(const kernels::CsrMatrix& l, const GridField& u) {
  std::vector<cplx> out(u.values.size());
  kernels::spmv(l, u.values, out);
  return out;
}

}  // namespace

TEST_CASE("dissipativity integral examples") {
  const auto d = GridDomain::unit_square(64);
  CHECK(dissipativity_integral(identity2(), mode(d), flat()) == doctest::Approx(pi * pi / 2).epsilon(0.01));
  CHECK(dissipativity_integral(linear_skew(), GridField::zeros(d), AuxBundle(make_builtin("ratio4"))) == 0.0);

  // Constant Hermitian skew part: the operator is still the Laplacian.
  std::mt19937_64 rng(21);
  const auto skew = MatrixField::constant(ComplexMatrix(2, {1.0, 2.0 * I, -2.0 * I, 1.0}));
  for (int k = 0; k < 5; ++k) {
    const GridField u = random_real(d, rng);
    const double base = dissipativity_integral(identity2(), u, flat());
    CHECK(std::abs(dissipativity_integral(skew, u, flat()) - base) <= 1e-10 * std::abs(base));
  }
}

TEST_CASE("linear skew plane probe") {
  const auto d = GridDomain::unit_square(128);
  const double exact = pi * pi / 2 - 81.0 / 16.0;  // negative: the operator is not dissipative
  const double value = dissipativity_integral(linear_skew(), linear_skew_probe(d), flat());
  CHECK(value < 0);
  CHECK(value == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("form_integral_v examples") {
  const auto d = GridDomain::unit_square(64);
  const GridField u = mode(d);
  CHECK(form_integral_v(identity2(), u, flat()) ==
        doctest::Approx(dissipativity_integral(identity2(), u, flat())).epsilon(1e-10));

  // Real v with PSD real part.
  std::mt19937_64 rng(4);
  const auto a = MatrixField::parse(2, {{{"2+x1", "0"}, {"x2", "0.3"}}, {{"x2", "0.3"}, {"1", "0"}}});
  for (const char* name : {"ratio4", "ratio_log"}) {
    const AuxBundle aux(make_builtin(name));
    for (int k = 0; k < 3; ++k) CHECK(form_integral_v(a, random_real(d, rng), aux) >= -1e-9);
  }
}

TEST_CASE("substitution identity converges") {
  const auto a = MatrixField::constant(ComplexMatrix(2, {1.0, 0.5 * I, 0.5 * I, cplx(1.0, 0.2)}));
  for (const auto& spec : {make_builtin("power", {{"p", 4.0}}), make_builtin("ratio4")}) {
    const AuxBundle aux(spec);
    std::vector<double> gaps;
    for (int n : {64, 128}) {
      const auto d = GridDomain::unit_square(n);
      const GridField u = smooth_field(d);
      const double direct = dissipativity_integral(a, u, aux);
      const double via_v = form_integral_v(a, sqrt_phi_times(aux, u), aux);
      gaps.push_back(std::abs(direct - via_v));
      if (n == 128) CHECK(via_v == doctest::Approx(direct).epsilon(0.02));
    }
    CHECK(gaps[1] <= 0.5 * gaps[0]);
  }
}

TEST_CASE("refinement convergence") {
  std::vector<double> v;
  for (int n : {32, 64, 128}) v.push_back(dissipativity_integral(linear_skew(), linear_skew_probe(GridDomain::unit_square(n)), flat()));
  const double ratio = std::abs(v[1] - v[0]) / std::abs(v[2] - v[1]);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("assembled operator") {
  // 1D: the three-point Laplacian.
  const GridDomain line(1.0, 9);
  const auto l1 = assemble_operator(MatrixField::constant(ComplexMatrix(1, {1.0})), line);
  const double h = 0.1;
  CHECK(l1.at(4, 4).real() == doctest::Approx(-2 / (h * h)));
  CHECK(l1.at(4, 3).real() == doctest::Approx(1 / (h * h)));
  CHECK(l1.at(4, 5).real() == doctest::Approx(1 / (h * h)));
  CHECK(l1.nnz() == 9 + 2 * 8);

  // Linearity in A.
  const auto d = GridDomain::unit_square(16);
  ComplexMatrix two = ComplexMatrix::identity(2);
  two(0, 0) = two(1, 1) = 2.0;
  const auto li = assemble_operator(identity2(), d);
  const auto l2 = assemble_operator(MatrixField::constant(two), d);
  REQUIRE(li.nnz() == l2.nnz());
  for (std::size_t k = 0; k < li.nnz(); ++k) CHECK(l2.val[k] == 2.0 * li.val[k]);
  // Five-point stencil for A = I.
  const std::size_t m = d.index(7, 7);
  const double hh = d.h(0) * d.h(0);
  CHECK(li.at(m, m).real() == doctest::Approx(-4 / hh));
  CHECK(li.at(m, d.index(8, 7)).real() == doctest::Approx(1 / hh));
  CHECK(li.at(m, d.index(7, 8)).real() == doctest::Approx(1 / hh));
  CHECK(li.at(m, d.index(8, 8)) == cplx(0.0));
}

TEST_CASE("operator reproduces the continuous symbol") {
  const double beta = 0.7;
  const auto a = MatrixField::constant(ComplexMatrix(2, {1.0, beta * I, beta * I, 1.0}));
  std::vector<double> errs;
  for (int n : {32, 64}) {
    const auto d = GridDomain::unit_square(n);
    const auto u = GridField::from_function(d, [](double x, double y) { return cplx(std::sin(pi * x) * std::sin(2 * pi * y)); });
    const auto lu = apply(assemble_operator(a, d), u);
    double err = 0, scale = 0;
    for (int j = 4; j < n - 4; ++j)
      for (int i = 4; i < n - 4; ++i) {
        const auto [x, y] = d.coord(d.index(i, j));
        const cplx exact = -5 * pi * pi * std::sin(pi * x) * std::sin(2 * pi * y) +
                           2.0 * I * beta * (2 * pi * pi) * std::cos(pi * x) * std::cos(2 * pi * y);
        err = std::max(err, std::abs(lu[d.index(i, j)] - exact));
        scale = std::max(scale, std::abs(exact));
      }
    errs.push_back(err / scale);
  }
  CHECK(errs[1] < 1e-2);
  CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("operator is self-adjoint for self-adjoint A") {
  const auto d = GridDomain::unit_square(24);
  const auto a = MatrixField::parse(2, {{{"2+x1*x2", "0"}, {"0.3*x1", "x2"}}, {{"0.3*x1", "-x2"}, {"1+x2", "0"}}});
  const auto l = assemble_operator(a, d);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 5; ++k) {
    GridField u = GridField::zeros(d), v = GridField::zeros(d);
    for (auto& z : u.values) z = {nd(rng), nd(rng)};
    for (auto& z : v.values) z = {nd(rng), nd(rng)};
    const auto lu = apply(l, u), lv = apply(l, v);
    const cplx lhs = kernels::dot(v.values, lu), rhs = kernels::dot(lv, u.values);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("discrete integration by parts") {
  const auto d = GridDomain::unit_square(20);
  const auto a = MatrixField::parse(2, {{{"1+x1", "x2"}, {"0.2", "0.5"}}, {{"-0.1", "x1"}, {"2", "0"}}});
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  GridField u = GridField::zeros(d), w = GridField::zeros(d);
  for (auto& z : u.values) z = {nd(rng), nd(rng)};
  for (auto& z : w.values) z = {nd(rng), nd(rng)};
  const DiscreteOperatorData op(a, d);
  const auto lu = apply(assemble_operator(op), u);
  const cplx rhs = -d.cell_volume() * kernels::dot(w.values, lu);
  const cplx lhs = sesquilinear(op, u, w);
  CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
}

TEST_CASE("evolve") {
  const auto d = GridDomain::unit_square(64);
  const double dt = 1e-3;
  const auto tr = evolve(identity2(), AuxBundle(make_builtin("power", {{"p", 2.0}, {"c", 2.0}})), mode(d), dt, 100);
  REQUIRE(tr.l2.size() == 101);
  for (std::size_t n = 0; n < tr.l2.size(); ++n)
    CHECK(tr.l2[n] == doctest::Approx(tr.l2[0] * std::pow(1 + dt * 2 * pi * pi, -double(n))).epsilon(1e-3));
  for (std::size_t n = 1; n < tr.times.size(); ++n) CHECK(tr.times[n] > tr.times[n - 1]);

  CHECK_THROWS_AS(evolve(identity2(), flat(), mode(d), dt, 0), PreconditionError);
  CHECK_THROWS_AS(evolve(identity2(), flat(), mode(d), 0.0, 5), PreconditionError);
}

TEST_CASE("evolution contracts every builtin norm") {
  const auto d = GridDomain::unit_square(32);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  GridField u0 = GridField::zeros(d);
  for (auto& z : u0.values) z = {nd(rng), nd(rng)};
  for (const auto& spec :
       {make_builtin("power", {{"p", 1.5}}), make_builtin("power", {{"p", 4.0}}), make_builtin("zygmund", {{"p", 3.0}}),
        make_builtin("ratio4"), make_builtin("ratio_log"), make_builtin("arctan_def")}) {
    const auto tr = evolve(identity2(), AuxBundle(spec), u0, 1e-3, 20);
    for (std::size_t n = 1; n < tr.orlicz.size(); ++n) {
      CHECK(tr.orlicz[n] <= tr.orlicz[n - 1] + 1e-12);
      CHECK(tr.luxemburg[n] <= tr.luxemburg[n - 1] * (1 + 1e-10));
    }
  }
}

TEST_CASE("probes on the Laplacian find nothing") {
  const auto d = GridDomain::unit_square(32);
  ProbeOptions opt;
  opt.budget = 300;
  opt.seed = 3;
  for (const auto& spec : {make_builtin("ratio4"), make_builtin("power", {{"p", 4.0}})}) {
    const auto res = probe_search(identity2(), AuxBundle(spec), d, opt);
    CHECK_FALSE(res.certified);
    CHECK(res.best_value <= 1e-9 * res.scale);
    CHECK(res.evaluations <= opt.budget);
  }
}

TEST_CASE("probe sign soundness for real coefficients") {
  const auto d = GridDomain::unit_square(32);
  const auto a = MatrixField::parse(2, {{{"2+x1", "0"}, {"0.5*x2", "0"}}, {{"-0.2", "0"}, {"1+x2", "0"}}});
  ProbeOptions opt;
  opt.budget = 200;
  for (const auto& spec : {make_builtin("ratio4"), make_builtin("ratio_log"), make_builtin("power", {{"p", 1.5}})}) {
    const auto res = probe_search(a, AuxBundle(spec), d, opt);
    CHECK(res.best_value <= 1e-9 * res.scale);
  }
}

TEST_CASE("probes refute the linear skew operator") {
  ProbeOptions opt;
  opt.budget = 2000;
  opt.seed = 42;
  const auto res = probe_search(linear_skew(), flat(), GridDomain::unit_square(64), opt);
  CHECK(res.best_value > 0);
  CHECK(res.certified);
}

TEST_CASE("probes find counterexamples past the threshold") {
  const AuxBundle ratio4(make_builtin("ratio4"));
  ProbeOptions opt;
  opt.family = ProbeKind::log_phase;
  opt.budget = 5000;
  opt.seed = 7;
  for (double b : {2.5, 3.0}) {
    const auto a = MatrixField::constant(ComplexMatrix(2, {1.0, b * I, b * I, 1.0}));
    REQUIRE(check_operator(a, ratio4).verdict == Verdict::not_dissipative);
    const auto res = probe_search(a, ratio4, GridDomain::unit_square(64), opt);
    CHECK(res.best_value > 0);
    CHECK(res.certified);
  }
}

TEST_CASE("serial and parallel kernels agree") {
  const auto d = GridDomain::unit_square(48);
  const AuxBundle aux(make_builtin("ratio4"));
  const GridField u = smooth_field(d);
  const double s = dissipativity_integral(linear_skew(), u, aux, Exec::serial);
  const double p = dissipativity_integral(linear_skew(), u, aux, Exec::parallel);
  CHECK(p == doctest::Approx(s).epsilon(1e-12));
  const double fs = form_integral_v(linear_skew(), u, aux, Exec::serial);
  CHECK(form_integral_v(linear_skew(), u, aux, Exec::parallel) == doctest::Approx(fs).epsilon(1e-12));
  CHECK(l2_norm(u, Exec::parallel) == doctest::Approx(l2_norm(u, Exec::serial)).epsilon(1e-12));
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "fdchk/criterion.hpp"
#include "fdchk/orlicz.hpp"

using namespace fdchk;

namespace {

// Oracles: closed-form λ₀ for powers, g(s) from a typed φ with central
// differences, and a brute-force minimizer of the (ξ, η) form that only
// evaluates the quadratic form itself.

const cplx I{0.0, 1.0};

double ratio4_phi(double s) { return 2 * s * s * (2 + s * s) / ((s * s + 1) * (s * s + 1)); }

double g_oracle(const std::function<double(double)>& phi, double s) {
  const double h = 1e-5 * s;
  const double dphi = (phi(s + h) - phi(s - h)) / (2 * h);
  const double dsphi = ((s + h) * phi(s + h) - (s - h) * phi(s - h)) / (2 * h);
  return std::abs(s * dphi) / (2.0 * std::sqrt(phi(s) * dsphi));
}

double lambda0_oracle(const std::function<double(double)>& phi) {
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) best = std::max(best, g_oracle(phi, std::pow(10.0, -4.0 + 8.0 * i / 20000)));
  return best;
}

// The form of form_matrix written out from its definition.
double form_value(const ComplexMatrix& a, double lam, std::span<const double> xi, std::span<const double> eta) {
  const std::size_t n = a.size();
  double sxx = 0, see = 0, im = 0, imstar = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = 0.5 * (a(i, j).real() + a(j, i).real());
      sxx += s * xi[j] * xi[i];
      see += s * eta[j] * eta[i];
      im += a(i, j).imag() * xi[j] * eta[i];
      imstar += -a(j, i).imag() * xi[j] * eta[i];
    }
  return (1 - lam * lam) * sxx + see + (1 + lam) * im + (1 - lam) * imstar;
}

double brute_min(const ComplexMatrix& a, double lam, std::mt19937_64& rng, int samples) {
  const std::size_t n = a.size();
  std::normal_distribution<double> nd;
  auto q = [&](const std::vector<double>& z) {
    return form_value(a, lam, std::span(z).first(n), std::span(z).subspan(n));
  };
  auto normalize = [](std::vector<double>& z) {
    double s = 0;
    for (double v : z) s += v * v;
    for (double& v : z) v /= std::sqrt(s);
  };
  std::vector<double> best(2 * n), z(2 * n);
  double best_val = INFINITY;
  for (int k = 0; k < samples; ++k) {
    for (double& v : z) v = nd(rng);
    normalize(z);
    const double v = q(z);
    if (v < best_val) best_val = v, best = z;
  }
  // Polish: projected gradient steps using the exact gradient of a quadratic,
  // obtained by polarization of q.
  const std::size_t m = 2 * n;
  std::vector<std::vector<double>> qm(m, std::vector<double>(m));
  std::vector<double> ei(m), ej(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::fill(ei.begin(), ei.end(), 0.0);
      ei[i] += 1.0;
      ei[j] += 1.0;
      std::fill(ej.begin(), ej.end(), 0.0);
      ej[i] = 1.0;
      const double qi = q(ej);
      std::fill(ej.begin(), ej.end(), 0.0);
      ej[j] = 1.0;
      qm[i][j] = i == j ? qi : 0.5 * (q(ei) - qi - q(ej));
    }
  double shift = 0;
  for (auto& row : qm)
    for (double v : row) shift += std::abs(v);
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i) {
      next[i] = shift * best[i];
      for (std::size_t j = 0; j < m; ++j) next[i] -= qm[i][j] * best[j];
    }
    normalize(next);
    best = next;
  }
  return std::min(best_val, q(best));
}

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool symmetric_im) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
  // Re A = BᵀB + small diagonal keeps the real part positive.
  ComplexMatrix b = a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double re = 0;
      for (std::size_t k = 0; k < n; ++k) re += b(k, i).real() * b(k, j).real();
      a(i, j).real(re + (i == j ? 0.1 : 0.0));
    }
  if (symmetric_im)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) a(i, j).imag(a(j, i).imag());
  return a;
}

SampleSpec quick_spec() {
  SampleSpec s;
  s.directions_2d = 360;
  s.t_points = 120;
  s.lambda0.points = 4001;
  return s;
}

ComplexMatrix skew_pair(double b) { return ComplexMatrix(2, {1.0, b * I, b * I, 1.0}); }

}  // namespace

TEST_CASE("lambda0 table") {
  for (double p : {1.5, 3.0, 4.0, 6.0}) {
    const AuxBundle aux(make_builtin("power", {{"p", p}}));
    CHECK(lambda0(aux) == doctest::Approx(std::abs(p - 2) / (2 * std::sqrt(p - 1))).epsilon(1e-6));
  }
  CHECK(lambda0(AuxBundle(make_builtin("power", {{"p", 2.0}}))) == doctest::Approx(0.0));

  const auto r4 = lambda0_search(make_builtin("ratio4"));
  CHECK(r4.finite());
  CHECK(r4.value == doctest::Approx(lambda0_oracle(ratio4_phi)).epsilon(1e-5));
  CHECK(r4.value == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));

  const auto rl = lambda0_search(make_builtin("ratio_log"));
  CHECK(rl.value == doctest::Approx(lambda0_oracle([](double s) {
                                      const double u = s * s;
                                      return 2 * u * u / ((u + 1) * (u + 1));
                                    })).epsilon(1e-5));

  // exp_power grows without bound: sφ'/φ ~ p s^p.
  const auto ep = lambda0_search(make_builtin("exp_power", {{"p", 2.0}}));
  CHECK_FALSE(ep.finite());
  CHECK_FALSE(ep.reason.empty());
}

TEST_CASE("lambda0 bounds the integrand") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lg(-6.0, 6.0);
  for (const char* name : {"ratio4", "ratio_log", "arctan_def"}) {
    const PhiSpec phi = make_builtin(name);
    const double l0 = lambda0_search(phi).value;
    for (int i = 0; i < 2000; ++i) CHECK(lambda0_integrand(phi, std::pow(10.0, lg(rng))) <= l0 + 1e-9);
  }
}

TEST_CASE("pointwise criterion examples") {
  const AuxBundle ratio4(make_builtin("ratio4"));
  const SampleSpec spec = quick_spec();

  const auto id = check_pointwise(MatrixField::constant(ComplexMatrix::identity(2)), ratio4, spec);
  CHECK(id.verdict == Verdict::dissipative);

  const auto bad = check_pointwise(MatrixField::constant(skew_pair(3.0)), ratio4, spec);
  CHECK(bad.verdict == Verdict::not_dissipative);
  REQUIRE(bad.witness);
  REQUIRE(bad.witness->xi.size() == 2);
  CHECK(std::abs(std::abs(bad.witness->xi[0]) - std::sqrt(0.5)) < 1e-3);
  CHECK(std::abs(std::abs(bad.witness->xi[1]) - std::sqrt(0.5)) < 1e-3);

  // The threshold for ratio4 is |b| = √3.
  const double b0 = std::sqrt(3.0);
  CHECK(check_pointwise(MatrixField::constant(skew_pair(b0 - 1e-6)), ratio4, spec).verdict == Verdict::dissipative);
  CHECK(check_pointwise(MatrixField::constant(skew_pair(b0 + 1e-6)), ratio4, spec).verdict ==
        Verdict::not_dissipative);

  // Non-symmetric Im A: only the necessary half applies.
  const auto ex = check_pointwise(MatrixField::parse(2, {{{"1", "0"}, {"0", "5*x1"}}, {{"0", "-5*x1"}, {"1", "0"}}}),
                                  AuxBundle(make_builtin("power", {{"p", 2.0}})), spec);
  CHECK_FALSE(ex.im_symmetric);
  CHECK(ex.verdict == Verdict::necessary_only_pass);
}

TEST_CASE("form_min_eig examples") {
  CHECK(form_min_eig(ComplexMatrix::identity(2), 0.0) == doctest::Approx(1.0));
  CHECK(form_min_eig(ComplexMatrix::identity(2), 0.5) == doctest::Approx(0.75));
  CHECK(form_min_eig(ComplexMatrix::identity(3), -0.5) == doctest::Approx(0.75));
  // Symmetric Im A drops out at Λ = 0 and enters with weight 2Λ otherwise:
  // min of ⟨Sξ,ξ⟩(1−Λ²) + |η|² + 2Λ b (ξ₁η₂ + ξ₂η₁) for A = I + ibJ.
  const ComplexMatrix a(2, {1.0, 2.0 * I, 2.0 * I, 1.0});
  CHECK(form_min_eig(a, 0.0) == doctest::Approx(1.0));
  const double l = 0.5, c = 1 - l * l, off = 2 * l;  // 2×2 block [[c, off], [off, 1]]
  CHECK(form_min_eig(a, l) == doctest::Approx(0.5 * (c + 1) - std::sqrt(0.25 * (c - 1) * (c - 1) + off * off)));
}

TEST_CASE("Hermitian skew part fails the form test") {
  // The cross block has singular value |γ|, so the minimum is 1 − |γ|.
  for (double g : {0.5, 1.0, 2.0})
    CHECK(std::abs(form_min_eig(ComplexMatrix(2, {1.0, g * I, -g * I, 1.0}), 0.0) - (1 - g)) <= 1e-9);
  CHECK_FALSE(sufficient_condition(MatrixField::constant(ComplexMatrix(2, {1.0, 2.0 * I, -2.0 * I, 1.0})),
                                   AuxBundle(make_builtin("power", {{"p", 2.0}})), quick_spec())
                  .passed);
}

TEST_CASE("form_min_eig agrees with brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-0.9, 0.9);
  for (int trial = 0; trial < 6; ++trial) {
    const ComplexMatrix a = random_matrix(rng, trial % 2 ? 3 : 2, trial % 3 == 0);
    const double l = lam(rng);
    CHECK(form_min_eig(a, l) == doctest::Approx(brute_min(a, l, rng, 100000)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("sufficient, necessary and kappa") {
  const SampleSpec spec = quick_spec();
  const AuxBundle flat(make_builtin("power", {{"p", 2.0}}));
  CHECK(strong_ellipticity_margin(MatrixField::constant(ComplexMatrix::identity(2)), flat, spec) ==
        doctest::Approx(1.0));
  ComplexMatrix two = ComplexMatrix::identity(2);
  two(0, 0) = 2.0;
  two(1, 1) = 2.0;
  CHECK(strong_ellipticity_margin(MatrixField::constant(two), flat, spec) == doctest::Approx(2.0));

  const AuxBundle p4(make_builtin("power", {{"p", 4.0}}));
  CHECK(strong_ellipticity_margin(MatrixField::constant(ComplexMatrix::identity(2)), p4, spec) ==
        doctest::Approx(0.75).epsilon(1e-6));

  const AuxBundle ratio4(make_builtin("ratio4"));
  CHECK(std::abs(strong_ellipticity_margin(MatrixField::constant(skew_pair(std::sqrt(3.0))), ratio4, spec)) <= 1e-6);

  CHECK(sufficient_condition(MatrixField::constant(ComplexMatrix::identity(2)), ratio4, spec).passed);
  CHECK_FALSE(sufficient_condition(MatrixField::constant(skew_pair(3.0)), ratio4, spec).passed);

  CHECK(necessary_real_part(MatrixField::constant(ComplexMatrix::identity(2)), spec).passed);
  const auto neg = necessary_real_part(MatrixField::constant(ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0})), spec);
  CHECK_FALSE(neg.passed);
  CHECK(neg.margin == doctest::Approx(-1.0));
}

TEST_CASE("check_operator examples") {
  const SampleSpec spec = quick_spec();
  const AuxBundle ratio4(make_builtin("ratio4"));
  CHECK(check_operator(MatrixField::constant(ComplexMatrix::identity(2)), ratio4, spec).verdict ==
        Verdict::dissipative);
  const auto bad = check_operator(MatrixField::constant(skew_pair(3.0)), ratio4, spec);
  CHECK(bad.verdict == Verdict::not_dissipative);
  CHECK(bad.kappa);
  CHECK(*bad.kappa < 0);

  const auto ex = check_operator(MatrixField::parse(2, {{{"1", "0"}, {"0", "5*x1"}}, {{"0", "-5*x1"}, {"1", "0"}}}),
                                 AuxBundle(make_builtin("power", {{"p", 2.0}})), spec);
  CHECK(ex.verdict == Verdict::inconclusive);
  CHECK(ex.witness);
}

TEST_CASE("pointwise criterion equals the form test for symmetric Im A") {
  std::mt19937_64 rng(5);
  SampleSpec spec = quick_spec();
  int agree = 0, total = 0, dissipative = 0;
  for (const char* name : {"ratio4", "ratio_log"}) {
    const AuxBundle aux(make_builtin(name));
    const auto lams = lambda_samples(aux, spec);
    for (int k = 0; k < 100; ++k) {
      ComplexMatrix a = random_matrix(rng, 2, true);
      // Scale Im A so both outcomes occur.
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) a(i, j).imag(a(i, j).imag() * (k % 4 + 0.5));
      double form = INFINITY;
      for (const auto& l : lams) form = std::min(form, form_min_eig(a, l.value));
      const auto rep = check_pointwise(MatrixField::constant(a), aux, spec);
      const bool crit = rep.verdict == Verdict::dissipative;
      ++total;
      agree += crit == (form >= -1e-6);
      dissipative += crit;
    }
  }
  CHECK(agree == total);
  CHECK(dissipative > 0);
  CHECK(dissipative < total);
}

TEST_CASE("criterion invariants") {
  std::mt19937_64 rng(9);
  const SampleSpec spec = quick_spec();
  const AuxBundle ratio4(make_builtin("ratio4"));
  const AuxBundle p3(make_builtin("power", {{"p", 3.0}}));
  const AuxBundle p6(make_builtin("power", {{"p", 6.0}}));
  REQUIRE(lambda0(p3) <= lambda0(p6));
  for (int k = 0; k < 40; ++k) {
    ComplexMatrix a = random_matrix(rng, 2, true);
    const auto base = check_pointwise(MatrixField::constant(a), ratio4, spec);
    // Scaling A scales the margin.
    ComplexMatrix a3 = a;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) a3(i, j) *= 3.0;
    const auto scaled = check_pointwise(MatrixField::constant(a3), ratio4, spec);
    CHECK(scaled.verdict == base.verdict);
    CHECK(scaled.worst_margin == doctest::Approx(3.0 * base.worst_margin).epsilon(1e-9).scale(1.0));
    // Larger λ₀ is harder to satisfy.
    if (check_pointwise(MatrixField::constant(a), p6, spec).verdict == Verdict::dissipative)
      CHECK(check_pointwise(MatrixField::constant(a), p3, spec).verdict == Verdict::dissipative);
  }
  // Real A with positive semidefinite real part is dissipative for every φ.
  for (const char* name : {"ratio4", "ratio_log", "arctan_def"}) {
    ComplexMatrix a = random_matrix(rng, 2, true);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) a(i, j).imag(0.0);
    CHECK(check_operator(MatrixField::constant(a), AuxBundle(make_builtin(name)), spec).verdict ==
          Verdict::dissipative);
  }
}

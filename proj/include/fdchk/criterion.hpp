#pragma once

// Algebraic dissipativity tests: λ₀, the pointwise criterion, the block
// quadratic form in (ξ, η) and the Φ-strong ellipticity margin.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fdchk/kernels.hpp"
#include "fdchk/linalg.hpp"
#include "fdchk/matrix_field.hpp"
#include "fdchk/orlicz.hpp"

namespace fdchk {

inline constexpr double kVerdictSlack = 1e-9;

/// g(s) = |sφ'(s)| / (2√(φ(s)(sφ(s))')), computed from the elasticity.
double lambda0_integrand(const PhiSpec& phi, double s);

struct Lambda0Options {
  double lo = 1e-8;
  double hi = 1e8;
  std::size_t points = 10001;
  double cap = 1e6;
  double slope_tol = 0.01;
};

struct Lambda0Result {
  double value = 0.0;  // +∞ when divergent
  double argmax = 0.0;
  std::string reason;  // why the value is +∞, empty otherwise
  Lambda0Options window;

  bool finite() const { return std::isfinite(value); }
};

Lambda0Result lambda0_search(const PhiSpec& phi, const Lambda0Options& opt = {}, Exec exec = Exec::parallel);
double lambda0(const AuxBundle& aux, const Lambda0Options& opt = {});

/// Limits of g at 0⁺ and +∞. The upper limit is extrapolated in 1/log s from
/// s = 1e100, 1e200, 1e300, which handles logarithmic convergence.
struct TailLimits {
  double at_zero = 0.0;
  double at_infinity = 0.0;
};
TailLimits lambda0_tail_limits(const PhiSpec& phi);

/// Sampling of x, ξ, s and t used by the pointwise tests.
struct SampleSpec {
  std::vector<double> x_lo{0.0, 0.0, 0.0};
  std::vector<double> x_hi{1.0, 1.0, 1.0};
  int points_per_axis = 9;
  std::size_t directions_2d = 720;
  std::size_t directions_3d = 2000;
  std::size_t s_points = 200;
  std::size_t t_points = 200;
  double t_lo = 1e-6, t_hi = 1e6;
  Lambda0Options lambda0;
};

std::vector<std::vector<double>> sample_points(const MatrixField& a, const SampleSpec& spec);
std::vector<std::vector<double>> sample_directions(std::size_t n, const SampleSpec& spec);

/// Λ(t) on the t-grid, plus the endpoint values Λ at s = 1e-12 and 1e12 when
/// Λ is monotone on the grid.
struct LambdaSample {
  double t;
  double value;
};
std::vector<LambdaSample> lambda_samples(const AuxBundle& aux, const SampleSpec& spec);

enum class Verdict { dissipative, not_dissipative, necessary_only_pass, sufficient_only_pass, inconclusive };
std::string_view to_string(Verdict v);

struct Witness {
  std::vector<double> x;
  std::optional<double> s;
  std::optional<double> t;
  std::vector<double> xi;
  std::vector<double> eta;
};

struct SubCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  std::optional<Witness> witness;
};

struct CriterionReport {
  Verdict verdict = Verdict::inconclusive;
  double lambda0 = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  std::optional<double> kappa;
  bool im_symmetric = true;
  std::vector<SubCheck> checks;
};

/// ‖Im A − (Im A)ᵀ‖∞ <= 1e-12 max(1, ‖A‖) at every sample point.
bool im_symmetric(const MatrixField& a, const SampleSpec& spec);

/// min over ξ of ⟨Re Aξ, ξ⟩ − λ|⟨Im Aξ, ξ⟩| on the unit sphere: eigen-guided
/// directions plus the sampled directions. Returns the value and minimizer.
std::pair<double, std::vector<double>> criterion_min(const ComplexMatrix& a, double lam,
                                                     const std::vector<std::vector<double>>& dirs);

CriterionReport check_pointwise(const MatrixField& a, const AuxBundle& aux, const SampleSpec& spec = {});

/// The real symmetric 2N×2N matrix of the form
/// (1−Λ²)⟨Sξ,ξ⟩ + ⟨Sη,η⟩ + (1+Λ)⟨Im A ξ,η⟩ + (1−Λ)⟨Im A* ξ,η⟩, S = Sym(Re A).
RealMatrix form_matrix(const ComplexMatrix& a, double lam);
double form_min_eig(const ComplexMatrix& a, double lam);

SubCheck sufficient_condition(const MatrixField& a, const AuxBundle& aux, const SampleSpec& spec = {});
SubCheck necessary_real_part(const MatrixField& a, const SampleSpec& spec = {});
double strong_ellipticity_margin(const MatrixField& a, const AuxBundle& aux, const SampleSpec& spec = {});

CriterionReport check_operator(const MatrixField& a, const AuxBundle& aux, const SampleSpec& spec = {});

}  // namespace fdchk

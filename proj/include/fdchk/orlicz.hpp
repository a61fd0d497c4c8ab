#pragma once

// Young function Φ, conjugate companion ψ, and the auxiliary functions
// ζ (inverse of s√φ(s)), Θ(t) = ζ(t)/t and Λ(t) = tΘ'(t)/Θ(t).

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdchk/errors.hpp"
#include "fdchk/grid.hpp"
#include "fdchk/kernels.hpp"
#include "fdchk/phi.hpp"

namespace fdchk {

struct LogGrid {
  double lo = 1e-8;
  double hi = 1e8;
  std::size_t points = 1001;

  std::vector<double> nodes() const;
};

enum class PhiFailure { none, non_positive_phi, non_monotone, exponent_mismatch };

std::string_view to_string(PhiFailure f);

struct ValidationReport {
  PhiFailure failure = PhiFailure::none;
  std::string message;
  std::optional<double> witness_s;

  bool cond1_c1 = false;        // φ and φ' finite, φ > 0 on samples
  bool cond2_monotone = false;  // (sφ)' > 0
  bool cond3_range = false;     // sampled range of sφ reaches below 1e-3 and above 1e3
  bool cond4_origin = false;    // (sφ)'/s^r within a 10x band on (0, s0)
  bool cond5_tail = false;      // φ' has the declared sign on [s1, grid max]

  double range_lo = 0.0, range_hi = 0.0;  // sampled min/max of sφ(s)
  double c1 = 0.0, c2 = 0.0;              // fitted bounds of (sφ)'/s^r on (0, s0)
  std::optional<double> phi_plus0;        // r = 0 only: φ at the smallest sample
  std::optional<double> s_dphi_at0;       // r = 0 only: sφ'(s) at the smallest sample

  bool ok() const {
    return failure == PhiFailure::none && cond1_c1 && cond2_monotone && cond3_range && cond4_origin && cond5_tail;
  }
};

/// PhiSpec for ψ: r' = -r/(r+1), s0' = s0 φ(s0), s1' = s1 φ(s1), tail sign flipped.
PhiSpec conjugate_spec(const PhiSpec& phi);

/// Sampled check of the admissibility conditions on φ. The grid must span
/// [1e-8, 1e8] with at least 10³ points.
ValidationReport validate_phi(const PhiSpec& phi, const LogGrid& grid = {});

/// Finds s > 0 with f(s) = target for increasing f: geometric bracket
/// expansion (factor 4) from [start, start], then bisection on log s.
/// Throws BracketFailure when no sign change appears within 10³ expansions.
template <class F>
double invert_increasing(F&& f, double target, double start);

/// Adaptive Simpson for ∫ₐᵇ f. Throws QuadratureFailure past the budget.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                        std::size_t max_evals = 2'000'000);

class AuxBundle {
 public:
  explicit AuxBundle(PhiSpec phi);

  const PhiSpec& phi() const { return phi_; }

  double Phi(double s) const;             // closed form when available, else quadrature
  double Phi_quadrature(double s) const;  // always by quadrature
  double psi(double t) const;
  double zeta(double t) const;
  double theta(double t) const;
  double lambda(double t) const;

  /// Λ(s√φ(s)) = -sφ'(s)/(sφ'(s) + 2φ(s)), evaluated through the elasticity.
  double lambda_at_s(double s) const;

  /// Bundle built from ψ; its Θ and Λ are 1/Θ and -Λ.
  AuxBundle conjugate() const;

  /// Solves sφ(s) = t.
  double invert_sphi(double t) const;

 private:
  PhiSpec phi_;
};

double young_Phi(const AuxBundle& aux, double s);
double conjugate_psi(const AuxBundle& aux, double t);
double lambda_fn(const AuxBundle& aux, double t);

/// Returns (Θ̃(t)Θ(t), Λ̃(t) + Λ(t)); both should be (1, 0).
std::pair<double, double> duality_check(const AuxBundle& aux, double t);

/// Σ Φ(|u_i|) w_i with the domain's node weights.
double orlicz_integral(const AuxBundle& aux, const GridField& u, Exec exec = Exec::parallel);

/// inf{λ > 0 : Σ Φ(|u_i|/λ) w_i <= 1}; zero for u = 0.
double luxemburg_norm(const AuxBundle& aux, const GridField& u, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------

template <class F>
double invert_increasing(F&& f, double target, double start) {
  if (!(target > 0.0) || !(start > 0.0)) throw BracketFailure("inversion needs positive target and start");
  double lo = start, hi = start;
  int expansions = 0;
  double flo = f(lo);
  while (!(flo <= target)) {
    if (++expansions > 1000 || std::isnan(flo)) throw BracketFailure("no sign change below the target");
    hi = lo;
    lo /= 4.0;
    flo = f(lo);
  }
  double fhi = f(hi);
  while (!(fhi >= target)) {
    if (++expansions > 1000 || std::isnan(fhi)) throw BracketFailure("no sign change above the target");
    lo = hi;
    hi *= 4.0;
    fhi = f(hi);
  }
  for (int it = 0; it < 400 && hi / lo - 1.0 > 1e-13; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo) * std::sqrt(hi);
}

}  // namespace fdchk

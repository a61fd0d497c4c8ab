#pragma once

// Discrete harness for E = ∇·(A∇u) on a Dirichlet rectangle.
//
// Quadrature: the pure second-derivative pairs (j, j) live on grid edges with
// two-point differences, so diagonal A gives an M-matrix operator. The mixed
// pairs (0, 1) and (1, 0) live at cell centres with fourth-order 4x4 stencils
// (odd reflection across the Dirichlet boundary) and midpoint weights with
// end corrections 26/24, 21/24, 25/24 on the first three cells of each axis.
// For diagonal A the operator is the standard 5-point one. Every integral here and the operator share these
// points, so
//     Σ_p W_p ⟨A(x_p) G u(p), G w(p)⟩ = −h₁h₂ Σ_m (Lu)_m conj(w_m)
// holds exactly (discrete integration by parts).

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdchk/grid.hpp"
#include "fdchk/kernels.hpp"
#include "fdchk/matrix_field.hpp"
#include "fdchk/orlicz.hpp"

namespace fdchk {

struct QuadPoint {
  static constexpr int kMaxNodes = 16;
  std::array<double, 2> x{};
  double w = 1.0;                                         // quadrature weight / (h₁h₂)
  std::uint8_t count = 0;                                 // stencil nodes in use
  std::array<std::int32_t, kMaxNodes> node{};             // interior indices
  std::array<std::array<double, kMaxNodes>, 2> g{};       // gradient weights per axis
  std::array<double, kMaxNodes> avg{};                    // interpolation weights
  std::uint8_t npairs = 0;
  std::array<std::array<std::uint8_t, 2>, 2> pairs{};     // (j, k): a_jk ∂_k u conj(∂_j w)
};

/// Quadrature points of a domain with A sampled at each of them.
class DiscreteOperatorData {
 public:
  DiscreteOperatorData(const MatrixField& a, const GridDomain& domain);

  const GridDomain& domain() const { return domain_; }
  const std::vector<QuadPoint>& points() const { return points_; }
  /// a_jk at point p for its pair slot q.
  cplx coeff(std::size_t p, std::size_t q) const { return coeff_[2 * p + q]; }
  /// (A − A*)_jk at point p for pair slot q.
  cplx skew(std::size_t p, std::size_t q) const { return skew_[2 * p + q]; }
  double weight() const { return domain_.cell_volume(); }

 private:
  GridDomain domain_;
  std::vector<QuadPoint> points_;
  std::vector<cplx> coeff_, skew_;
};

/// Σ_p W_p ⟨A G u, G w⟩ (complex); the dissipativity integral is its real part
/// with w = φ(|u|)u.
cplx sesquilinear(const DiscreteOperatorData& op, const GridField& u, const GridField& w, Exec exec = Exec::parallel);

/// φ(|u|)u nodewise, zero where |u| < 1e-14 max|u|.
GridField phi_times(const AuxBundle& aux, const GridField& u);

/// Re Σ ⟨A∇u, ∇(φ(|u|)u)⟩ W_p. Non-negative for every u iff dissipative.
double dissipativity_integral(const MatrixField& a, const GridField& u, const AuxBundle& aux,
                              Exec exec = Exec::parallel);
double dissipativity_integral(const DiscreteOperatorData& op, const GridField& u, const AuxBundle& aux,
                              Exec exec = Exec::parallel);

/// Σ_p W_p Σ_jk |a_jk| |G_k u| |G_j w|: the size against which a violation is judged.
double energy_scale(const DiscreteOperatorData& op, const GridField& u, const AuxBundle& aux);

/// The v-form Re Σ [⟨A∇v,∇v⟩ + Λ(|v|)⟨(A−A*)∇|v|, |v|⁻¹v̄∇v⟩ − Λ²(|v|)⟨A∇|v|,∇|v|⟩] W_p.
double form_integral_v(const MatrixField& a, const GridField& v, const AuxBundle& aux, Exec exec = Exec::parallel);
double form_integral_v(const DiscreteOperatorData& op, const GridField& v, const AuxBundle& aux,
                       Exec exec = Exec::parallel);

/// v = √φ(|u|) u nodewise.
GridField sqrt_phi_times(const AuxBundle& aux, const GridField& u);

/// The sparse operator L with −h₁h₂ Σ (Lu)_m conj(w_m) = sesquilinear(u, w).
kernels::CsrMatrix assemble_operator(const MatrixField& a, const GridDomain& domain);
kernels::CsrMatrix assemble_operator(const DiscreteOperatorData& op);

struct SolveStats {
  std::size_t iterations = 0;
  double residual = 0.0;  // relative
};

/// Jacobi-preconditioned BiCGStab for M x = b. Throws SolverDivergence when the
/// relative residual stays above tol after max_iter iterations.
SolveStats bicgstab(const kernels::CsrMatrix& m, std::span<const cplx> b, std::span<cplx> x, double tol = 1e-12,
                    std::size_t max_iter = 10000, Exec exec = Exec::parallel);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> orlicz;
  std::vector<double> luxemburg;
  std::vector<double> l2;
  std::vector<std::size_t> iterations;
  GridField final_field;
};

double l2_norm(const GridField& u, Exec exec = Exec::parallel);

/// Backward Euler (I − dt L)u^{n+1} = u^n, recording norms at t = 0 and after
/// each step. tol is the relative residual of each linear solve.
Trajectory evolve(const MatrixField& a, const AuxBundle& aux, const GridField& u0, double dt, int steps,
                  double tol = 1e-12, Exec exec = Exec::parallel);

// --- probes -----------------------------------------------------------------

enum class ProbeKind { plane_phase, log_phase, random_bumps, combined };
std::string_view to_string(ProbeKind k);
ProbeKind probe_kind_from_string(std::string_view s);

/// Real profile ρ vanishing on the boundary.
struct Profile {
  enum class Shape { sine, bump } shape = Shape::sine;
  int k1 = 1, k2 = 1;             // sine harmonics
  double angle = 0.0;             // bump rotation (radians)
  double aspect = 1.0;            // bump major/minor ratio
  std::array<double, 2> center{}; // bump centre
  double radius = 0.4;            // bump major semi-axis

  std::string describe() const;
  double eval(const GridDomain& d, double x1, double x2) const;
};

std::vector<Profile> profile_library(const GridDomain& d);

struct Probe {
  ProbeKind kind = ProbeKind::plane_phase;
  Profile profile;
  double amplitude = 1.0;
  double direction = 0.0;  // plane_phase: angle of ξ
  double freq = 0.0;       // plane_phase: λ; log_phase: μ
  double eps = 1e-2;       // log_phase
  std::uint64_t seed = 0;  // random_bumps
  int count = 0;           // random_bumps

  GridField field(const GridDomain& d) const;
  std::map<std::string, double> parameters() const;
  std::string describe() const;
};

struct ProbeOptions {
  ProbeKind family = ProbeKind::combined;
  std::size_t budget = 2000;
  std::uint64_t seed = 1;
  double certify_ratio = 1e-6;
};

struct ProbeResult {
  /// Largest violation −Re∫⟨A∇u, ∇(φ(|u|)u)⟩ found; positive refutes dissipativity.
  double best_value = -std::numeric_limits<double>::infinity();
  double integral = 0.0;  // the dissipativity integral at the best probe
  double scale = 0.0;     // energy_scale at the best probe
  bool certified = false;
  std::size_t evaluations = 0;
  Probe witness;
};

ProbeResult probe_search(const MatrixField& a, const AuxBundle& aux, const GridDomain& domain,
                         const ProbeOptions& opt = {}, Exec exec = Exec::parallel);

}  // namespace fdchk

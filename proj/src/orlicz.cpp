#include "fdchk/orlicz.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace fdchk {

namespace {

// ψ(t) = 1/φ(S(t)) where S inverts sφ(s).
class ConjugateWeight final : public WeightFunction {
 public:
  explicit ConjugateWeight(PhiSpec base) : base_(std::move(base)) {}

  double phi(double t) const override { return 1.0 / base_.phi(S(t)); }

  // ψ'(t) = -φ'(S) / (φ(S)² (φ(S) + Sφ'(S)))
  double dphi(double t) const override {
    const double s = S(t);
    const double f = base_.phi(s);
    return -base_.elasticity(s) / (s * f * f * base_.one_plus_elasticity(s));
  }

  double elasticity(double t) const override {
    const double s = S(t);
    return -base_.elasticity(s) / base_.one_plus_elasticity(s);
  }

  double one_plus_elasticity(double t) const override { return 1.0 / base_.one_plus_elasticity(S(t)); }

  // Ψ(t) = tS - Φ(S), the Legendre transform of Φ.
  std::optional<double> young(double t) const override {
    const double s = S(t);
    return t * s - AuxBundle(base_).Phi(s);
  }

 private:
  double S(double t) const {
    return invert_increasing([this](double s) { return s * base_.phi(s); }, t, t);
  }

  PhiSpec base_;
};

struct SimpsonState {
  const std::function<double(double)>& f;
  double abs_tol;
  double rel_tol;
  std::size_t max_evals;
  std::size_t evals = 0;

  double eval(double x) {
    if (++evals > max_evals) throw QuadratureFailure("adaptive Simpson: evaluation budget exhausted");
    const double v = f(x);
    if (!std::isfinite(v)) throw QuadratureFailure("adaptive Simpson: non-finite integrand");
    return v;
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double target = std::max(tol, rel_tol * std::abs(left + right));
    if (std::abs(delta) <= 15.0 * target) return left + right + delta / 15.0;
    if (depth >= 60) throw QuadratureFailure("adaptive Simpson: subdivision limit reached");
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

double checked_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("auxiliary functions need finite t > 0");
  return t;
}

}  // namespace

std::vector<double> LogGrid::nodes() const {
  std::vector<double> out(points);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

std::string_view to_string(PhiFailure f) {
  switch (f) {
    case PhiFailure::none: return "none";
    case PhiFailure::non_positive_phi: return "NonPositivePhi";
    case PhiFailure::non_monotone: return "NonMonotone";
    case PhiFailure::exponent_mismatch: return "ExponentMismatch";
  }
  return "none";
}

PhiSpec conjugate_spec(const PhiSpec& phi) {
  PhiSpec out;
  out.kind = "conjugate";
  out.phi_expr = phi.label();
  out.r = -phi.r / (phi.r + 1.0);
  out.s0 = phi.s0 * phi.phi(phi.s0);
  out.s1 = std::max(out.s0, phi.s1 * phi.phi(phi.s1));
  out.tail_sign = phi.tail_sign == TailSign::nonneg ? TailSign::nonpos : TailSign::nonneg;
  out.fn = std::make_shared<ConjugateWeight>(phi);
  return out;
}

ValidationReport validate_phi(const PhiSpec& phi, const LogGrid& grid) {
  if (grid.lo > 1e-8 || grid.hi < 1e8 || grid.points < 1000)
    throw PreconditionError("validate_phi: grid must span [1e-8, 1e8] with at least 1000 points");

  ValidationReport rep;
  std::ostringstream notes;
  auto fail = [&](PhiFailure f, double s, const std::string& msg) {
    if (rep.failure == PhiFailure::none) {
      rep.failure = f;
      rep.witness_s = s;
    }
    notes << msg << "; ";
  };

  std::vector<double> s_vals = grid.nodes();
  std::vector<double> phis, elas, slope;  // slope = 1 + e
  phis.reserve(s_vals.size());
  elas.reserve(s_vals.size());
  slope.reserve(s_vals.size());
  bool c1 = true;
  std::size_t kept = 0;
  for (double s : s_vals) {
    double f = 0.0, e = 0.0, one_e = 0.0;
    try {
      f = phi.phi(s);
      e = phi.elasticity(s);
      one_e = phi.one_plus_elasticity(s);
    } catch (const EvalError& err) {
      c1 = false;
      notes << "evaluation failed at s=" << s << ": " << err.what() << "; ";
      break;
    }
    // Fast-growing φ overflows double long before 1e8; the samples past the
    // overflow point carry no information and are dropped.
    if (f == std::numeric_limits<double>::infinity() && kept > 0) {
      notes << "phi overflows double beyond s=" << s_vals[kept - 1] << ", samples truncated; ";
      break;
    }
    if (std::isnan(f) || !std::isfinite(f) || !std::isfinite(e)) {
      c1 = false;
      notes << "non-finite value at s=" << s << "; ";
      break;
    }
    if (!(f > 0.0)) {
      fail(PhiFailure::non_positive_phi, s, "phi <= 0 at s=" + std::to_string(s));
      c1 = false;
      break;
    }
    phis.push_back(f);
    elas.push_back(e);
    slope.push_back(one_e);
    ++kept;
  }
  s_vals.resize(kept);
  rep.cond1_c1 = c1 && kept == phis.size() && kept > 0;

  if (kept == 0) {
    rep.message = notes.str();
    return rep;
  }

  // Condition 2: (sφ)' = φ(1 + e) > 0.
  rep.cond2_monotone = true;
  for (std::size_t i = 0; i < kept; ++i) {
    if (!(slope[i] > 0.0)) {
      rep.cond2_monotone = false;
      fail(PhiFailure::non_monotone, s_vals[i], "(s phi)' <= 0 at s=" + std::to_string(s_vals[i]));
      break;
    }
  }

  // Condition 3: sampled range of sφ.
  rep.range_lo = std::numeric_limits<double>::infinity();
  rep.range_hi = 0.0;
  for (std::size_t i = 0; i < kept; ++i) {
    const double v = s_vals[i] * phis[i];
    rep.range_lo = std::min(rep.range_lo, v);
    rep.range_hi = std::max(rep.range_hi, v);
  }
  rep.cond3_range = rep.range_lo < 1e-3 && rep.range_hi > 1e3;
  if (!rep.cond3_range) notes << "sampled range of s*phi is [" << rep.range_lo << ", " << rep.range_hi << "]; ";

  // Condition 4: (sφ)'/s^r on (0, s0).
  rep.c1 = std::numeric_limits<double>::infinity();
  rep.c2 = 0.0;
  for (std::size_t i = 0; i < kept && s_vals[i] < phi.s0; ++i) {
    const double ratio = phis[i] * slope[i] / std::pow(s_vals[i], phi.r);
    rep.c1 = std::min(rep.c1, ratio);
    rep.c2 = std::max(rep.c2, ratio);
  }
  rep.cond4_origin = rep.c2 > 0.0 && rep.c2 <= 10.0 * rep.c1;
  if (!rep.cond4_origin && rep.c2 > 0.0)
    fail(PhiFailure::exponent_mismatch, phi.s0,
         "(s phi)'/s^r ranges over [" + std::to_string(rep.c1) + ", " + std::to_string(rep.c2) + "] on (0, s0)");
  if (phi.r == 0.0) {
    rep.phi_plus0 = phis.front();
    rep.s_dphi_at0 = s_vals.front() * phi.dphi(s_vals.front());
    const bool limit_ok = std::abs(elas.front()) <= 1e-3;
    if (!limit_ok) {
      rep.cond4_origin = false;
      fail(PhiFailure::exponent_mismatch, s_vals.front(), "r = 0 but s phi'(s) does not vanish relative to phi at 0+");
    }
  }

  // Condition 5: sign of φ' on [s1, max sample].
  rep.cond5_tail = true;
  for (std::size_t i = 0; i < kept; ++i) {
    if (s_vals[i] < phi.s1) continue;
    const bool ok = phi.tail_sign == TailSign::nonneg ? elas[i] >= -1e-12 : elas[i] <= 1e-12;
    if (!ok) {
      rep.cond5_tail = false;
      notes << "phi' has the wrong sign at s=" << s_vals[i] << "; ";
      break;
    }
  }

  rep.message = notes.str();
  return rep;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                        std::size_t max_evals) {
  if (a == b) return 0.0;
  SimpsonState st{f, abs_tol, rel_tol, max_evals};
  const double fa = st.eval(a), fb = st.eval(b), fm = st.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return st.recurse(a, b, fa, fm, fb, whole, abs_tol, 0);
}

AuxBundle::AuxBundle(PhiSpec phi) : phi_(std::move(phi)) {
  if (!phi_.fn) throw PreconditionError("AuxBundle: PhiSpec has no weight function");
}

double AuxBundle::Phi(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw PreconditionError("young_Phi: s must be finite and >= 0");
  if (s == 0.0) return 0.0;
  if (auto v = phi_.fn->young(s)) return *v;
  return Phi_quadrature(s);
}

double AuxBundle::Phi_quadrature(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw PreconditionError("young_Phi: s must be finite and >= 0");
  if (s == 0.0) return 0.0;
  constexpr double abs_tol = 1e-12, rel_tol = 1e-10;
  auto integrand = [this](double x) { return x * phi_.phi(x); };

  // Near 0, σφ(σ) ~ C σ^{1+r}: integrate dyadic panels toward the origin and
  // close with the power-law estimate ∫₀ᵇ ≈ b²φ(b)/(2+r).
  const double a = std::min(s, phi_.s0);
  double near = 0.0;
  double b = a;
  for (int k = 0; k < 200; ++k) {
    const double lo = 0.5 * b;
    near += adaptive_simpson(integrand, lo, b, abs_tol * 1e-3, rel_tol);
    b = lo;
    const double tail = b * b * phi_.phi(b) / (2.0 + phi_.r);
    if (tail <= std::max(abs_tol * 1e-3, rel_tol * 1e-2 * near)) {
      near += tail;
      break;
    }
  }

  // Above s0 the integrand can grow fast; geometric panels keep each piece tame.
  double far = 0.0;
  for (double lo = a; lo < s;) {
    const double hi = std::min(s, 2.0 * lo);
    far += adaptive_simpson(integrand, lo, hi, abs_tol, rel_tol);
    lo = hi;
  }
  return near + far;
}

double AuxBundle::invert_sphi(double t) const {
  checked_t(t);
  return invert_increasing([this](double s) { return s * phi_.phi(s); }, t, t);
}

double AuxBundle::psi(double t) const { return 1.0 / phi_.phi(invert_sphi(t)); }

double AuxBundle::zeta(double t) const {
  checked_t(t);
  return invert_increasing([this](double s) { return s * std::sqrt(phi_.phi(s)); }, t, t);
}

double AuxBundle::theta(double t) const { return zeta(t) / t; }

double AuxBundle::lambda_at_s(double s) const {
  const double e = phi_.elasticity(s);
  return -e / (e + 2.0);
}

double AuxBundle::lambda(double t) const { return lambda_at_s(zeta(t)); }

AuxBundle AuxBundle::conjugate() const { return AuxBundle(conjugate_spec(phi_)); }

double young_Phi(const AuxBundle& aux, double s) { return aux.Phi(s); }

double conjugate_psi(const AuxBundle& aux, double t) { return aux.psi(t); }

double lambda_fn(const AuxBundle& aux, double t) { return aux.lambda(t); }

std::pair<double, double> duality_check(const AuxBundle& aux, double t) {
  const AuxBundle conj = aux.conjugate();
  return {conj.theta(t) * aux.theta(t), conj.lambda(t) + aux.lambda(t)};
}

double orlicz_integral(const AuxBundle& aux, const GridField& u, Exec exec) {
  const double w = u.domain.node_weight();
  return w * kernels::sum<double>(u.values.size(), [&](std::size_t i) { return aux.Phi(std::abs(u.values[i])); }, exec);
}

double luxemburg_norm(const AuxBundle& aux, const GridField& u, Exec exec) {
  const double umax = u.max_abs();
  if (umax == 0.0) return 0.0;
  const double w = u.domain.node_weight();
  auto modular = [&](double lam) {
    return w * kernels::sum<double>(
                   u.values.size(), [&](std::size_t i) { return aux.Phi(std::abs(u.values[i]) / lam); }, exec);
  };

  // Σ Φ(|u|/λ) w <= |Ω| Φ(max|u|/λ), so λ = max|u| / Φ⁻¹(1/|Ω|) is an upper bound.
  const double level = 1.0 / u.domain.measure();
  const double inv = invert_increasing([&](double s) { return aux.Phi(s); }, level, 1.0);
  double hi = umax / inv;
  int expansions = 0;
  while (!(modular(hi) <= 1.0)) {
    if (++expansions > 1000) throw BracketFailure("luxemburg_norm: no upper bracket");
    hi *= 2.0;
  }
  double lo = 0.5 * hi;
  while (modular(lo) <= 1.0) {
    if (++expansions > 1000) throw BracketFailure("luxemburg_norm: no lower bracket");
    hi = lo;
    lo *= 0.5;
  }
  while (hi - lo >= 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (modular(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace fdchk

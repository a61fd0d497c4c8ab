#pragma once

// Weight functions φ and the PhiSpec record every criterion consumes.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdchk/dsl.hpp"
#include "fdchk/toml.hpp"

namespace fdchk {

enum class TailSign { nonneg, nonpos };

std::string_view to_string(TailSign t);

/// φ together with its derivative. Implementations are immutable.
class WeightFunction {
 public:
  virtual ~WeightFunction() = default;

  virtual double phi(double s) const = 0;
  virtual double dphi(double s) const = 0;

  /// s φ'(s) / φ(s). Builtins override with overflow-free closed forms.
  virtual double elasticity(double s) const { return s * dphi(s) / phi(s); }

  /// 1 + elasticity = (sφ)'/φ. Overridden where the sum cancels.
  virtual double one_plus_elasticity(double s) const { return 1.0 + elasticity(s); }

  /// Closed-form Φ(s) = ∫₀ˢ σ φ(σ) dσ when one is known.
  virtual std::optional<double> young(double) const { return std::nullopt; }
};

struct PhiSpec {
  /// Builtin name (power, zygmund, exp_power, arctan_def, ratio4, ratio_log),
  /// "custom", or "conjugate" for the ψ built from another spec.
  std::string kind;
  std::map<std::string, double> params;
  std::string phi_expr;
  std::string dphi_expr;

  double r = 0.0;
  double s0 = 0.5;
  double s1 = 1.0;
  TailSign tail_sign = TailSign::nonneg;

  std::shared_ptr<const WeightFunction> fn;

  double phi(double s) const { return fn->phi(s); }
  double dphi(double s) const { return fn->dphi(s); }
  double elasticity(double s) const { return fn->elasticity(s); }
  double one_plus_elasticity(double s) const { return fn->one_plus_elasticity(s); }

  std::string label() const;
};

const std::vector<std::string>& builtin_names();

/// Throws ConfigError for unknown names or invalid parameters.
PhiSpec make_builtin(std::string_view name, const std::map<std::string, double>& params = {});

PhiSpec make_custom(const std::string& phi_expr, const std::string& dphi_expr, double r, double s0, double s1,
                    TailSign tail);

/// Parses "builtin:ratio4" or "builtin:power(p=3,c=1)".
PhiSpec parse_phi_argument(std::string_view text);

PhiSpec phi_from_toml(const toml::Value& table);
toml::Value phi_to_toml(const PhiSpec& phi);

}  // namespace fdchk

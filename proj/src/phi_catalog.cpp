#include <cmath>
#include <numbers>
#include <sstream>

#include "fdchk/errors.hpp"
#include "fdchk/phi.hpp"

namespace fdchk {

namespace {

using std::numbers::e;

// φ(s) = c s^{p-2},  Φ(s) = c s^p / p
class PowerWeight final : public WeightFunction {
 public:
  PowerWeight(double p, double c) : p_(p), c_(c) {}
  double phi(double s) const override { return c_ * std::pow(s, p_ - 2.0); }
  double dphi(double s) const override { return c_ * (p_ - 2.0) * std::pow(s, p_ - 3.0); }
  double elasticity(double) const override { return p_ - 2.0; }
  std::optional<double> young(double s) const override { return c_ * std::pow(s, p_) / p_; }

 private:
  double p_, c_;
};

// Φ(s) = s^p log(s+e)
class ZygmundWeight final : public WeightFunction {
 public:
  explicit ZygmundWeight(double p) : p_(p) {}
  double phi(double s) const override {
    const double q = s / (s + e);
    return std::pow(s, p_ - 2.0) * (p_ * std::log(s + e) + q);
  }
  double dphi(double s) const override {
    const double q = s / (s + e);
    const double L = std::log(s + e);
    return std::pow(s, p_ - 3.0) * ((p_ - 2.0) * (p_ * L + q) + p_ * q + q * (1.0 - q));
  }
  double elasticity(double s) const override {
    const double q = s / (s + e);
    const double L = std::log(s + e);
    return (p_ - 2.0) + (p_ * q + q * (1.0 - q)) / (p_ * L + q);
  }
  std::optional<double> young(double s) const override { return std::pow(s, p_) * std::log(s + e); }

 private:
  double p_;
};

// Φ(s) = exp(s^p) - 1
class ExpPowerWeight final : public WeightFunction {
 public:
  explicit ExpPowerWeight(double p) : p_(p) {}
  double phi(double s) const override { return p_ * std::pow(s, p_ - 2.0) * std::exp(std::pow(s, p_)); }
  double dphi(double s) const override { return phi(s) * elasticity(s) / s; }
  double elasticity(double s) const override { return (p_ - 2.0) + p_ * std::pow(s, p_); }
  std::optional<double> young(double s) const override { return std::expm1(std::pow(s, p_)); }

 private:
  double p_;
};

// Φ(s) = s - arctan s
class ArctanWeight final : public WeightFunction {
 public:
  double phi(double s) const override { return s / (s * s + 1.0); }
  double dphi(double s) const override {
    const double d = s * s + 1.0;
    return (1.0 - s * s) / (d * d);
  }
  double elasticity(double s) const override { return (1.0 - s * s) / (1.0 + s * s); }
  double one_plus_elasticity(double s) const override { return 2.0 / (1.0 + s * s); }
  std::optional<double> young(double s) const override {
    if (s < 1e-2) {
      // s³/3 - s⁵/5 + s⁷/7 - ...
      const double s2 = s * s;
      double term = s * s2, acc = 0.0;
      for (int k = 3; k < 40; k += 2) {
        acc += ((k / 2) % 2 == 1 ? 1.0 : -1.0) * term / k;
        term *= s2;
      }
      return acc;
    }
    return s - std::atan(s);
  }
};

// Φ(s) = s⁴/(s²+1)
class Ratio4Weight final : public WeightFunction {
 public:
  double phi(double s) const override {
    const double u = s * s;
    return 2.0 * u * (2.0 + u) / ((u + 1.0) * (u + 1.0));
  }
  double dphi(double s) const override { return phi(s) * elasticity(s) / s; }
  double elasticity(double s) const override {
    const double u = s * s;
    return 4.0 / ((2.0 + u) * (1.0 + u));
  }
  std::optional<double> young(double s) const override {
    const double u = s * s;
    return u * u / (u + 1.0);
  }
};

// Φ(s) = s²(s²+2)/(s²+1) - 2 log(s²+1)
class RatioLogWeight final : public WeightFunction {
 public:
  double phi(double s) const override {
    const double u = s * s;
    return 2.0 * u * u / ((u + 1.0) * (u + 1.0));
  }
  double dphi(double s) const override { return phi(s) * elasticity(s) / s; }
  double elasticity(double s) const override { return 4.0 / (s * s + 1.0); }
  std::optional<double> young(double s) const override {
    const double u = s * s;
    if (u < 0.1) {
      // Σ_{k≥3} (-1)^{k+1} (1 - 2/k) u^k, the closed form loses all digits near 0
      double acc = 0.0, term = u * u * u;
      for (int k = 3; k < 60; ++k) {
        acc += (k % 2 == 1 ? 1.0 : -1.0) * (1.0 - 2.0 / k) * term;
        term *= u;
      }
      return acc;
    }
    return u * (u + 2.0) / (u + 1.0) - 2.0 * std::log1p(u);
  }
};

class ExprWeight final : public WeightFunction {
 public:
  ExprWeight(dsl::Expr phi, dsl::Expr dphi) : phi_(std::move(phi)), dphi_(std::move(dphi)) {}
  double phi(double s) const override { return phi_.eval(dsl::Bindings().set(dsl::Var::s, s)); }
  double dphi(double s) const override { return dphi_.eval(dsl::Bindings().set(dsl::Var::s, s)); }

 private:
  dsl::Expr phi_, dphi_;
};

double param(const std::map<std::string, double>& params, const std::string& key, std::optional<double> fallback) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw ConfigError("builtin phi: missing parameter '" + key + "'");
}

void reject_unknown(const std::map<std::string, double>& params, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw ConfigError("builtin phi: unknown parameter '" + k + "'");
  }
}

TailSign parse_tail(const std::string& s) {
  if (s == "nonneg") return TailSign::nonneg;
  if (s == "nonpos") return TailSign::nonpos;
  throw ConfigError("phi.tail_sign must be \"nonneg\" or \"nonpos\", got \"" + s + "\"");
}

}  // namespace

std::string_view to_string(TailSign t) { return t == TailSign::nonneg ? "nonneg" : "nonpos"; }

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"power", "zygmund", "exp_power", "arctan_def", "ratio4", "ratio_log"};
  return names;
}

std::string PhiSpec::label() const {
  if (kind == "custom") return "custom(" + phi_expr + ")";
  std::ostringstream os;
  os << kind;
  if (!params.empty()) {
    os << '(';
    bool first = true;
    for (const auto& [k, v] : params) {
      os << (first ? "" : ",") << k << '=' << v;
      first = false;
    }
    os << ')';
  }
  return os.str();
}

PhiSpec make_builtin(std::string_view name, const std::map<std::string, double>& params) {
  PhiSpec spec;
  spec.kind = std::string(name);
  spec.params = params;
  spec.s0 = 0.5;
  spec.s1 = 1.0;
  if (name == "power") {
    reject_unknown(params, {"p", "c"});
    const double p = param(params, "p", std::nullopt);
    const double c = param(params, "c", 1.0);
    if (!(p > 1.0)) throw ConfigError("power: p must exceed 1");
    if (!(c > 0.0)) throw ConfigError("power: c must be positive");
    spec.fn = std::make_shared<PowerWeight>(p, c);
    spec.r = p - 2.0;
    spec.tail_sign = p >= 2.0 ? TailSign::nonneg : TailSign::nonpos;
  } else if (name == "zygmund") {
    reject_unknown(params, {"p"});
    const double p = param(params, "p", std::nullopt);
    if (!(p > 1.0)) throw ConfigError("zygmund: p must exceed 1");
    spec.fn = std::make_shared<ZygmundWeight>(p);
    spec.r = p - 2.0;
    spec.tail_sign = p >= 2.0 ? TailSign::nonneg : TailSign::nonpos;
  } else if (name == "exp_power") {
    reject_unknown(params, {"p"});
    const double p = param(params, "p", std::nullopt);
    if (!(p > 0.0)) throw ConfigError("exp_power: p must be positive");
    spec.fn = std::make_shared<ExpPowerWeight>(p);
    // (sφ)' ~ p(p-1) s^{p-2} near 0 for p > 1; for p = 1 it tends to 1
    spec.r = p > 1.0 ? p - 2.0 : 0.0;
    spec.tail_sign = TailSign::nonneg;
  } else if (name == "arctan_def") {
    reject_unknown(params, {});
    spec.fn = std::make_shared<ArctanWeight>();
    spec.r = 1.0;
    spec.tail_sign = TailSign::nonpos;
  } else if (name == "ratio4") {
    reject_unknown(params, {});
    spec.fn = std::make_shared<Ratio4Weight>();
    spec.r = 2.0;
  } else if (name == "ratio_log") {
    reject_unknown(params, {});
    spec.fn = std::make_shared<RatioLogWeight>();
    spec.r = 4.0;
  } else {
    throw ConfigError("unknown builtin phi '" + std::string(name) + "'");
  }
  return spec;
}

PhiSpec make_custom(const std::string& phi_expr, const std::string& dphi_expr, double r, double s0, double s1,
                    TailSign tail) {
  if (!(r > -1.0)) throw ConfigError("phi.r must exceed -1");
  if (!(s0 > 0.0) || !(s1 >= s0)) throw ConfigError("phi: require 0 < s0 <= s1");
  auto phi = dsl::parse(phi_expr);
  auto dphi = dsl::parse(dphi_expr);
  for (auto v : {dsl::Var::x1, dsl::Var::x2, dsl::Var::x3}) {
    if (phi.uses(v) || dphi.uses(v)) throw ConfigError("phi expressions may only use the variable s");
  }
  PhiSpec spec;
  spec.kind = "custom";
  spec.phi_expr = phi_expr;
  spec.dphi_expr = dphi_expr;
  spec.r = r;
  spec.s0 = s0;
  spec.s1 = s1;
  spec.tail_sign = tail;
  spec.fn = std::make_shared<ExprWeight>(std::move(phi), std::move(dphi));
  return spec;
}

PhiSpec parse_phi_argument(std::string_view text) {
  constexpr std::string_view prefix = "builtin:";
  if (text.substr(0, prefix.size()) != prefix) throw ConfigError("--phi expects builtin:NAME or builtin:NAME(k=v,...)");
  text.remove_prefix(prefix.size());
  std::map<std::string, double> params;
  const auto open = text.find('(');
  std::string_view name = text.substr(0, open);
  if (open != std::string_view::npos) {
    if (text.back() != ')') throw ConfigError("--phi: missing ')'");
    std::string_view body = text.substr(open + 1, text.size() - open - 2);
    while (!body.empty()) {
      const auto comma = body.find(',');
      std::string_view item = body.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ConfigError("--phi: parameters are k=v pairs");
      const std::string key(item.substr(0, eq));
      const std::string val(item.substr(eq + 1));
      try {
        std::size_t used = 0;
        params[key] = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw ConfigError("--phi: parameter '" + key + "' is not a number");
      }
      body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    }
  }
  return make_builtin(name, params);
}

PhiSpec phi_from_toml(const toml::Value& table) {
  const auto* kind = table.find("kind");
  if (kind == nullptr) throw ConfigError("phi: missing key 'kind'");
  const std::string k = kind->as_string("phi.kind");
  auto number_or = [&](const char* key, std::optional<double> fallback) -> std::optional<double> {
    if (const auto* v = table.find(key)) return v->as_number(std::string("phi.") + key);
    return fallback;
  };
  PhiSpec spec;
  if (k == "custom") {
    const auto* phi = table.find("phi_expr");
    const auto* dphi = table.find("dphi_expr");
    if (phi == nullptr || dphi == nullptr) throw ConfigError("custom phi needs phi_expr and dphi_expr");
    const auto r = number_or("r", std::nullopt);
    if (!r) throw ConfigError("custom phi needs r");
    const auto tail = table.find("tail_sign");
    spec = make_custom(phi->as_string("phi.phi_expr"), dphi->as_string("phi.dphi_expr"), *r, *number_or("s0", 0.5),
                       *number_or("s1", 1.0), tail ? parse_tail(tail->as_string("phi.tail_sign")) : TailSign::nonneg);
  } else {
    std::map<std::string, double> params;
    if (const auto* p = table.find("params")) {
      for (const auto& [key, v] : p->as_table("phi.params")) params[key] = v.as_number("phi.params." + key);
    }
    spec = make_builtin(k, params);
    if (auto r = number_or("r", std::nullopt)) spec.r = *r;
    if (auto s0 = number_or("s0", std::nullopt)) spec.s0 = *s0;
    if (auto s1 = number_or("s1", std::nullopt)) spec.s1 = *s1;
    if (const auto* tail = table.find("tail_sign")) spec.tail_sign = parse_tail(tail->as_string("phi.tail_sign"));
    if (!(spec.r > -1.0)) throw ConfigError("phi.r must exceed -1");
    if (!(spec.s0 > 0.0) || !(spec.s1 >= spec.s0)) throw ConfigError("phi: require 0 < s0 <= s1");
  }
  return spec;
}

toml::Value phi_to_toml(const PhiSpec& phi) {
  toml::Table t;
  t["kind"] = phi.kind;
  if (phi.kind == "custom") {
    t["phi_expr"] = phi.phi_expr;
    t["dphi_expr"] = phi.dphi_expr;
  } else if (!phi.params.empty()) {
    toml::Table p;
    for (const auto& [k, v] : phi.params) p[k] = v;
    t["params"] = toml::Value(std::move(p));
  }
  t["r"] = phi.r;
  t["s0"] = phi.s0;
  t["s1"] = phi.s1;
  t["tail_sign"] = std::string(to_string(phi.tail_sign));
  return toml::Value(std::move(t));
}

}  // namespace fdchk

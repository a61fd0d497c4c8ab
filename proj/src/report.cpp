#include "fdchk/report.hpp"

#include <ctime>
#include <cmath>
#include <sstream>

#include "fdchk/errors.hpp"

namespace fdchk {

Format format_from_string(std::string_view s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  throw ConfigError("unknown format '" + std::string(s) + "' (json, csv, text)");
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json to_json(const PhiSpec& phi) {
  json j{{"kind", phi.kind}, {"label", phi.label()}, {"r", phi.r}, {"s0", phi.s0}, {"s1", phi.s1},
         {"tail_sign", std::string(to_string(phi.tail_sign))}};
  if (!phi.params.empty()) j["params"] = phi.params;
  if (phi.kind == "custom") {
    j["phi_expr"] = phi.phi_expr;
    j["dphi_expr"] = phi.dphi_expr;
  }
  return j;
}

json to_json(const ValidationReport& r) {
  json j{{"valid", r.ok()},
         {"failure", std::string(to_string(r.failure))},
         {"conditions",
          {{"c1_positive", r.cond1_c1},
           {"monotone", r.cond2_monotone},
           {"range", r.cond3_range},
           {"origin", r.cond4_origin},
           {"tail", r.cond5_tail}}},
         {"range", {number(r.range_lo), number(r.range_hi)}},
         {"origin_bounds", {number(r.c1), number(r.c2)}}};
  if (!r.message.empty()) j["message"] = r.message;
  if (r.witness_s) j["witness_s"] = *r.witness_s;
  if (r.phi_plus0) j["phi_plus0"] = number(*r.phi_plus0);
  if (r.s_dphi_at0) j["s_dphi_at0"] = number(*r.s_dphi_at0);
  return j;
}

json to_json(const Lambda0Result& r) {
  json j{{"lambda0", number(r.value)},
         {"finite", r.finite()},
         {"window", {{"lo", r.window.lo}, {"hi", r.window.hi}, {"points", r.window.points}, {"cap", r.window.cap}}}};
  if (r.finite()) j["argmax"] = number(r.argmax);
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

json to_json(const TailLimits& t) { return {{"at_zero", number(t.at_zero)}, {"at_infinity", number(t.at_infinity)}}; }

json to_json(const Witness& w) {
  json j{{"x", w.x}};
  if (w.s) j["s"] = number(*w.s);
  if (w.t) j["t"] = number(*w.t);
  if (!w.xi.empty()) j["xi"] = w.xi;
  if (!w.eta.empty()) j["eta"] = w.eta;
  return j;
}

json to_json(const CriterionReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj{{"name", c.name}, {"passed", c.passed}, {"margin", number(c.margin)}};
    if (c.witness) cj["witness"] = to_json(*c.witness);
    checks.push_back(std::move(cj));
  }
  json j{{"verdict", std::string(to_string(r.verdict))},
         {"lambda0", number(r.lambda0)},
         {"worst_margin", number(r.worst_margin)},
         {"im_symmetric", r.im_symmetric},
         {"checks", std::move(checks)}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.kappa) j["kappa"] = number(*r.kappa);
  return j;
}

json to_json(const GridDomain& d) {
  json lengths = json::array(), nodes = json::array();
  for (int a = 0; a < d.dims(); ++a) {
    lengths.push_back(d.length(a));
    nodes.push_back(d.nodes(a));
  }
  return {{"dims", d.dims()}, {"lengths", lengths}, {"nodes", nodes}};
}

json to_json(const ProbeResult& r, const GridDomain& d) {
  json params = json::object();
  for (const auto& [k, v] : r.witness.parameters()) params[k] = number(v);
  return {{"family", std::string(to_string(r.witness.kind))},
          {"best_value", number(r.best_value)},
          {"integral", number(r.integral)},
          {"scale", number(r.scale)},
          {"certified", r.certified},
          {"evaluations", r.evaluations},
          {"witness", r.witness.describe()},
          {"parameters", params},
          {"grid", to_json(d)}};
}

json to_json(const Trajectory& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.times.size(); ++i)
    rows.push_back({{"t", t.times[i]},
                    {"orlicz_integral", number(t.orlicz[i])},
                    {"luxemburg_norm", number(t.luxemburg[i])},
                    {"l2_norm", number(t.l2[i])},
                    {"iterations", t.iterations[i]}});
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.orlicz.size(); ++i) worst = std::max(worst, t.orlicz[i] - t.orlicz[i - 1]);
  return {{"steps", t.times.empty() ? 0 : t.times.size() - 1},
          {"max_orlicz_increase", number(worst)},
          {"orlicz_nonincreasing", !(worst > 1e-12)},
          {"trajectory", rows}};
}

json make_report(const Provenance& p, json body) {
  json prov{{"tool", "fdchk"}, {"version", kVersion}, {"command", p.command}, {"tolerances", p.tolerances}};
  if (!p.config_hash.empty()) prov["config_hash"] = p.config_hash;
  if (p.grid) prov["grid"] = to_json(*p.grid);
  if (p.seed) prov["seed"] = *p.seed;
  if (p.timestamp) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    prov["generated_at"] = buf;
  }
  body["schema"] = kSchema;
  body["provenance"] = std::move(prov);
  return body;
}

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  os << "t,orlicz_integral,luxemburg_norm,l2_norm\n";
  for (std::size_t i = 0; i < t.times.size(); ++i)
    os << t.times[i] << ',' << t.orlicz[i] << ',' << t.luxemburg[i] << ',' << t.l2[i] << '\n';
  return os.str();
}

std::string render(const json& report, Format f, const Trajectory* trajectory) {
  if (f == Format::json) return report.dump(2) + "\n";
  if (f == Format::csv && trajectory != nullptr) return trajectory_csv(*trajectory);
  json body = report;
  if (trajectory != nullptr) body.erase("trajectory");
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(body, "", rows);
  std::string out = f == Format::csv ? "key,value\n" : "";
  for (const auto& [k, v] : rows)
    out += f == Format::csv ? csv_field(k) + "," + csv_field(v) + "\n" : k + ": " + v + "\n";
  return out;
}

}  // namespace fdchk

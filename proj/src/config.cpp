#include "fdchk/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fdchk/errors.hpp"

namespace fdchk {

namespace {

template <class T>
const T& need(const std::optional<T>& v, const char* section) {
  if (!v) throw ConfigError(std::string("config has no [") + section + "] section");
  return *v;
}

double number_or(const toml::Value& t, const char* section, const char* key, double fallback) {
  const auto* v = t.find(key);
  return v ? v->as_number(std::string(section) + "." + key) : fallback;
}

std::int64_t integer_or(const toml::Value& t, const char* section, const char* key, std::int64_t fallback) {
  const auto* v = t.find(key);
  return v ? v->as_integer(std::string(section) + "." + key) : fallback;
}

std::string string_or(const toml::Value& t, const char* section, const char* key, std::string fallback) {
  const auto* v = t.find(key);
  return v ? v->as_string(std::string(section) + "." + key) : fallback;
}

std::vector<double> numbers(const toml::Value& v, const std::string& what) {
  std::vector<double> out;
  for (const auto& x : v.as_array(what)) out.push_back(x.as_number(what));
  return out;
}

}  // namespace

const PhiSpec& RunConfig::require_phi() const { return need(phi, "phi"); }
const MatrixField& RunConfig::require_matrix() const { return need(matrix, "matrix"); }
const GridDomain& RunConfig::require_domain() const { return need(domain, "domain"); }
const InitialSpec& RunConfig::require_initial() const { return need(initial, "initial"); }
const TimeSpec& RunConfig::require_time() const { return need(time, "time"); }

MatrixField matrix_from_toml(const toml::Value& t) {
  const auto* dim = t.find("dimension");
  const auto* rows = t.find("entries");
  if (rows == nullptr) throw ConfigError("matrix: missing key 'entries'");
  const auto& arr = rows->as_array("matrix.entries");
  const std::int64_t n = dim ? dim->as_integer("matrix.dimension") : static_cast<std::int64_t>(arr.size());
  if (n < 1 || n > 3) throw ConfigError("matrix.dimension must be 1, 2 or 3");
  std::vector<std::vector<std::pair<std::string, std::string>>> entries;
  for (const auto& row : arr) {
    auto& out = entries.emplace_back();
    for (const auto& cell : row.as_array("matrix.entries row")) {
      if (cell.is_string() || cell.is_number()) {
        // A bare value is a real entry.
        out.emplace_back(cell.is_string() ? cell.as_string() : std::to_string(cell.as_number()), "0");
        continue;
      }
      out.emplace_back(string_or(cell, "matrix.entries", "re", "0"), string_or(cell, "matrix.entries", "im", "0"));
    }
  }
  return MatrixField::parse(static_cast<std::size_t>(n), entries);
}

GridDomain domain_from_toml(const toml::Value& t) {
  const auto* l = t.find("lengths");
  const auto* n = t.find("nodes");
  if (n == nullptr) throw ConfigError("domain: missing key 'nodes'");
  std::vector<double> nodes;
  if (n->is_number())
    nodes = {n->as_number(), n->as_number()};
  else
    nodes = numbers(*n, "domain.nodes");
  std::vector<double> lengths = l ? numbers(*l, "domain.lengths") : std::vector<double>(nodes.size(), 1.0);
  if (lengths.size() != nodes.size() || nodes.empty() || nodes.size() > 2)
    throw ConfigError("domain.lengths and domain.nodes need one or two matching entries");
  for (double x : nodes)
    if (x != std::floor(x) || x < 8 || x > 1e5) throw ConfigError("domain.nodes must be integers in [8, 1e5]");
  for (double x : lengths)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("domain.lengths must be positive");
  if (nodes.size() == 1) return GridDomain(lengths[0], static_cast<int>(nodes[0]));
  return GridDomain(lengths[0], lengths[1], static_cast<int>(nodes[0]), static_cast<int>(nodes[1]));
}

RunConfig config_from_toml(const toml::Value& root, std::string_view source_text) {
  RunConfig c;
  c.hash = content_hash(source_text);
  if (const auto* t = root.find("phi")) c.phi = phi_from_toml(*t);
  if (const auto* t = root.find("matrix")) c.matrix = matrix_from_toml(*t);
  if (const auto* t = root.find("domain")) c.domain = domain_from_toml(*t);
  if (const auto* t = root.find("initial")) {
    c.initial = InitialSpec{string_or(*t, "initial", "re", "0"), string_or(*t, "initial", "im", "0")};
  }
  if (const auto* t = root.find("time")) {
    TimeSpec ts;
    ts.dt = number_or(*t, "time", "dt", ts.dt);
    ts.steps = static_cast<int>(integer_or(*t, "time", "steps", ts.steps));
    ts.tol = number_or(*t, "time", "tol", ts.tol);
    if (!(ts.dt > 0.0) || ts.steps < 1 || !(ts.tol > 0.0)) throw ConfigError("time: need dt > 0, steps >= 1, tol > 0");
    c.time = ts;
  }
  if (const auto* t = root.find("probe")) {
    c.probe.family = probe_kind_from_string(string_or(*t, "probe", "family", "combined"));
    const auto budget = integer_or(*t, "probe", "budget", static_cast<std::int64_t>(c.probe.budget));
    const auto seed = integer_or(*t, "probe", "seed", static_cast<std::int64_t>(c.probe.seed));
    if (budget < 1 || seed < 0) throw ConfigError("probe: need budget >= 1 and seed >= 0");
    c.probe.budget = static_cast<std::size_t>(budget);
    c.probe.seed = static_cast<std::uint64_t>(seed);
    c.probe.certify_ratio = number_or(*t, "probe", "certify_ratio", c.probe.certify_ratio);
  }
  if (const auto* t = root.find("sample")) {
    SampleSpec& s = c.sample;
    if (const auto* v = t->find("x_lo")) s.x_lo = numbers(*v, "sample.x_lo");
    if (const auto* v = t->find("x_hi")) s.x_hi = numbers(*v, "sample.x_hi");
    s.points_per_axis = static_cast<int>(integer_or(*t, "sample", "points_per_axis", s.points_per_axis));
    s.directions_2d = static_cast<std::size_t>(integer_or(*t, "sample", "directions_2d", s.directions_2d));
    s.directions_3d = static_cast<std::size_t>(integer_or(*t, "sample", "directions_3d", s.directions_3d));
    s.s_points = static_cast<std::size_t>(integer_or(*t, "sample", "s_points", s.s_points));
    s.t_points = static_cast<std::size_t>(integer_or(*t, "sample", "t_points", s.t_points));
    s.t_lo = number_or(*t, "sample", "t_lo", s.t_lo);
    s.t_hi = number_or(*t, "sample", "t_hi", s.t_hi);
    if (s.points_per_axis < 1 || s.s_points < 2 || s.t_points < 2 || !(s.t_lo > 0.0) || !(s.t_hi > s.t_lo))
      throw ConfigError("sample: invalid sampling parameters");
  }
  if (c.matrix && c.domain && c.matrix->dimension() != static_cast<std::size_t>(c.domain->dims()))
    throw ConfigError("matrix.dimension does not match the domain dimension");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return config_from_toml(toml::parse(text), text);
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char out[32];
  std::snprintf(out, sizeof out, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace fdchk

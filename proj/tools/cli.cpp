#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fdchk/config.hpp"
#include "fdchk/criterion.hpp"
#include "fdchk/errors.hpp"
#include "fdchk/orlicz.hpp"
#include "fdchk/pde.hpp"
#include "fdchk/report.hpp"

namespace fdchk::cli {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format = "json";
  std::string phi;
  std::string grid;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  double tol = 0.0;
  bool no_timestamp = false;
  bool seed_set = false, budget_set = false, tol_set = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "TOML config file");
  sub->add_option("--out", o.out, "output path (stdout when absent)");
  sub->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  sub->add_option("--seed", o.seed, "probe RNG seed");
  sub->add_option("--budget", o.budget, "probe evaluation budget")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "solver tolerance (evolve) or certification ratio (op-probe)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--grid", o.grid, "grid nodes, N or NxM");
  sub->add_flag("--no-timestamp", o.no_timestamp, "omit the generation time from reports");
}

RunConfig load(const Options& o, bool required) {
  if (o.config.empty()) {
    if (required) throw ConfigError("--config is required");
    return {};
  }
  return load_config(o.config);
}

PhiSpec phi_of(const Options& o, const RunConfig& c) {
  if (!o.phi.empty()) return parse_phi_argument(o.phi);
  if (c.phi) return *c.phi;
  throw ConfigError("need --phi or a config with a [phi] section");
}

GridDomain grid_of(const Options& o, const RunConfig& c) {
  if (o.grid.empty()) return c.require_domain();
  int n1 = 0, n2 = 0;
  char x = 0;
  std::istringstream in(o.grid);
  in >> n1;
  const bool pair = static_cast<bool>(in >> x);
  if (pair && !(x == 'x' && in >> n2)) throw ConfigError("--grid must be N or NxM");
  if (!pair) n2 = n1;
  if (n1 < 8 || n2 < 8) throw ConfigError("--grid needs at least 8 nodes per axis");
  const double l1 = c.domain ? c.domain->length(0) : 1.0;
  if (c.domain && c.domain->dims() == 1) return GridDomain(l1, n1);
  const double l2 = c.domain ? c.domain->length(1) : 1.0;
  return GridDomain(l1, l2, n1, n2);
}

Provenance provenance(const std::string& command, const Options& o, const RunConfig& c) {
  Provenance p;
  p.command = command;
  p.config_hash = c.hash;
  p.timestamp = !o.no_timestamp;
  p.tolerances = {{"verdict_slack", kVerdictSlack}};
  return p;
}

void emit(const Options& o, const json& report, std::ostream& out, const Trajectory* tr = nullptr) {
  const std::string text = render(report, format_from_string(o.format), tr);
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + o.out + "'");
  f << text;
}

// --- commands ----------------------------------------------------------------

int phi_validate(const Options& o, std::ostream& out) {
  const RunConfig c = load(o, false);
  const PhiSpec phi = phi_of(o, c);
  const ValidationReport v = validate_phi(phi);
  Provenance p = provenance("phi-validate", o, c);
  p.tolerances["grid"] = {{"lo", LogGrid{}.lo}, {"hi", LogGrid{}.hi}, {"points", LogGrid{}.points}};
  emit(o, make_report(p, {{"phi", to_json(phi)}, {"validation", to_json(v)}}), out);
  return kExitOk;
}

int phi_lambda0(const Options& o, std::ostream& out) {
  const RunConfig c = load(o, false);
  const PhiSpec phi = phi_of(o, c);
  const Lambda0Result r = lambda0_search(phi);
  json body{{"phi", to_json(phi)}, {"result", to_json(r)}};
  body["lambda0"] = number(r.value);
  if (r.finite()) body["tail_limits"] = to_json(lambda0_tail_limits(phi));
  emit(o, make_report(provenance("phi-lambda0", o, c), std::move(body)), out);
  return kExitOk;
}

int op_check(const Options& o, std::ostream& out) {
  const RunConfig c = load(o, true);
  const AuxBundle aux(c.require_phi());
  const CriterionReport r = check_operator(c.require_matrix(), aux, c.sample);
  Provenance p = provenance("op-check", o, c);
  p.tolerances["directions_2d"] = c.sample.directions_2d;
  p.tolerances["directions_3d"] = c.sample.directions_3d;
  p.tolerances["points_per_axis"] = c.sample.points_per_axis;
  p.tolerances["t_points"] = c.sample.t_points;
  emit(o, make_report(p, {{"phi", to_json(c.require_phi())}, {"criterion", to_json(r)}}), out);
  return kExitOk;
}

int op_probe(const Options& o, std::ostream& out) {
  const RunConfig c = load(o, true);
  const AuxBundle aux(c.require_phi());
  const GridDomain d = grid_of(o, c);
  ProbeOptions po = c.probe;
  if (o.seed_set) po.seed = o.seed;
  if (o.budget_set) po.budget = o.budget;
  if (o.tol_set) po.certify_ratio = o.tol;
  const ProbeResult r = probe_search(c.require_matrix(), aux, d, po);
  Provenance p = provenance("op-probe", o, c);
  p.grid = d;
  p.seed = po.seed;
  p.tolerances["certify_ratio"] = po.certify_ratio;
  p.tolerances["budget"] = po.budget;
  json body = to_json(r, d);
  body["phi"] = to_json(c.require_phi());
  emit(o, make_report(p, std::move(body)), out);
  return kExitOk;
}

int evolve_cmd(const Options& o, std::ostream& out) {
  const RunConfig c = load(o, true);
  const AuxBundle aux(c.require_phi());
  const GridDomain d = grid_of(o, c);
  TimeSpec ts = c.require_time();
  if (o.tol_set) ts.tol = o.tol;
  const InitialSpec& init = c.require_initial();
  const GridField u0 = GridField::from_exprs(d, dsl::parse(init.re), dsl::parse(init.im));
  const Trajectory tr = evolve(c.require_matrix(), aux, u0, ts.dt, ts.steps, ts.tol);
  Provenance p = provenance("evolve", o, c);
  p.grid = d;
  p.tolerances["solver"] = ts.tol;
  json body = to_json(tr);
  body["phi"] = to_json(c.require_phi());
  body["dt"] = ts.dt;
  emit(o, make_report(p, std::move(body)), out, &tr);
  return kExitOk;
}

// Regenerates the reference reproductions into a directory.
int examples(const Options& o, std::ostream& out) {
  namespace fs = std::filesystem;
  using std::numbers::pi;
  const fs::path dir = o.out.empty() ? fs::path("fdchk-examples") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());
  const Format fmt = format_from_string(o.format);
  const std::string ext = fmt == Format::json ? ".json" : fmt == Format::csv ? ".csv" : ".txt";
  auto write = [&](const std::string& name, const json& report) {
    const fs::path path = dir / (name + ext);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << render(report, fmt);
    out << path.string() << "\n";
  };
  Provenance prov;
  prov.timestamp = !o.no_timestamp;
  prov.tolerances = {{"verdict_slack", kVerdictSlack}};

  // λ₀ table.
  {
    struct Row {
      PhiSpec phi;
      double expected;
    };
    std::vector<Row> rows;
    for (double p : {1.5, 2.0, 3.0, 4.0, 10.0})
      rows.push_back({make_builtin("power", {{"p", p}}), std::abs(p - 2.0) / (2.0 * std::sqrt(p - 1.0))});
    rows.push_back({make_builtin("ratio4"), 1.0 / std::sqrt(3.0)});
    rows.push_back({make_builtin("ratio_log"), 2.0 / std::sqrt(5.0)});
    for (double p : {1.0, 2.0}) rows.push_back({make_builtin("exp_power", {{"p", p}}), INFINITY});
    rows.push_back({make_builtin("arctan_def"), INFINITY});
    rows.push_back({make_builtin("zygmund", {{"p", 3.0}}), NAN});
    json table = json::array();
    for (const auto& row : rows) {
      const Lambda0Result r = lambda0_search(row.phi);
      json j{{"phi", row.phi.label()}, {"lambda0", number(r.value)}};
      if (!std::isnan(row.expected)) j["expected"] = number(row.expected);
      if (r.finite()) j["tail_limits"] = to_json(lambda0_tail_limits(row.phi));
      if (!r.reason.empty()) j["reason"] = r.reason;
      table.push_back(std::move(j));
    }
    prov.command = "examples/lambda0_table";
    write("lambda0_table", make_report(prov, {{"rows", table}}));
  }

  // Constant skew-symmetric imaginary part: the operator is the Laplacean.
  {
    const GridDomain d = GridDomain::unit_square(64);
    const AuxBundle one(make_builtin("power", {{"p", 2.0}}));
    const GridField u = GridField::from_function(
        d, [](double x, double y) { return cplx(x * (1 - x) * std::sin(pi * y) * (1 + x * y)); });
    const double base = dissipativity_integral(MatrixField::constant(ComplexMatrix::identity(2)), u, one);
    json rows = json::array();
    for (double g : {0.5, 1.0, 2.0}) {
      const ComplexMatrix a(2, {cplx(1, 0), cplx(0, g), cplx(0, -g), cplx(1, 0)});
      const double val = dissipativity_integral(MatrixField::constant(a), u, one);
      rows.push_back({{"gamma", g},
                      {"form_min_eig_at_zero", form_min_eig(a, 0.0)},
                      {"expected", 1.0 - g},
                      {"integral", val},
                      {"laplacean_integral", base}});
    }
    prov.command = "examples/constant_skew";
    prov.grid = d;
    write("constant_skew", make_report(prov, {{"rows", rows}}));
  }

  // A = [[1, iλx₁], [−iλx₁, 1]], λ = 9: the plane-phase probe refutes dissipativity.
  {
    const GridDomain d = GridDomain::unit_square(128);
    const AuxBundle one(make_builtin("power", {{"p", 2.0}}));
    const MatrixField a = MatrixField::parse(2, {{{"1", "0"}, {"0", "9*x1"}}, {{"0", "-9*x1"}, {"1", "0"}}});
    const GridField u = GridField::from_function(
        d, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y) * std::polar(1.0, -4.5 * y); });
    const double val = dissipativity_integral(a, u, one);
    ProbeOptions po;
    po.family = ProbeKind::plane_phase;
    po.budget = 2000;
    po.seed = o.seed_set ? o.seed : 1;
    const GridDomain dp = GridDomain::unit_square(64);
    const ProbeResult r = probe_search(a, one, dp, po);
    prov.command = "examples/linear_skew";
    prov.grid = d;
    prov.seed = po.seed;
    write("linear_skew", make_report(prov, {{"integral", val},
                                            {"violation", -val},
                                            {"expected_violation", 81.0 / 16.0 - pi * pi / 2.0},
                                            {"probe", to_json(r, dp)}}));
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fdchk: L^Φ-dissipativity checks for ∇·(A∇u)", "fdchk"};
  app.require_subcommand(1, 1);
  Options o;
  auto* validate = app.add_subcommand("phi-validate", "check the admissibility conditions on φ");
  auto* lam = app.add_subcommand("phi-lambda0", "compute λ₀ for φ");
  auto* check = app.add_subcommand("op-check", "algebraic dissipativity verdict for A");
  auto* probe = app.add_subcommand("op-probe", "search for a violating test function");
  auto* evo = app.add_subcommand("evolve", "backward-Euler trajectory with Orlicz norms");
  auto* ex = app.add_subcommand("examples", "regenerate the reference reproductions into --out");
  for (auto* sub : {validate, lam, check, probe, evo, ex}) add_common(sub, o);
  for (auto* sub : {validate, lam}) sub->add_option("--phi", o.phi, "builtin:NAME or builtin:NAME(k=v,...)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fdchk: " << e.what() << "\n";
    return kExitInput;
  }
  for (auto* sub : {validate, lam, check, probe, evo, ex}) {
    if (!sub->parsed()) continue;
    o.seed_set = sub->count("--seed") > 0;
    o.budget_set = sub->count("--budget") > 0;
    o.tol_set = sub->count("--tol") > 0;
  }

  try {
    if (validate->parsed()) return phi_validate(o, out);
    if (lam->parsed()) return phi_lambda0(o, out);
    if (check->parsed()) return op_check(o, out);
    if (probe->parsed()) return op_probe(o, out);
    if (evo->parsed()) return evolve_cmd(o, out);
    return examples(o, out);
  } catch (const InputError& e) {
    err << "fdchk: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "fdchk: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "fdchk: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace fdchk::cli

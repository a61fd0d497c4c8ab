#pragma once

// Run configuration read from TOML. Each section is optional; commands ask
// for the sections they need and get a ConfigError naming the missing one.
//
//   [phi]      kind, params, r, s0, s1, tail_sign, phi_expr, dphi_expr
//   [matrix]   dimension, entries = [[{re, im}, ...], ...]
//   [domain]   lengths = [L1, L2], nodes = [n1, n2]   (one entry each in 1D)
//   [initial]  re, im                                  (expressions in x1, x2)
//   [time]     dt, steps, tol
//   [probe]    family, budget, seed, certify_ratio
//   [sample]   x_lo, x_hi, points_per_axis, directions_2d, directions_3d,
//              s_points, t_points, t_lo, t_hi

#include <cstdint>
#include <optional>
#include <string>

#include "fdchk/criterion.hpp"
#include "fdchk/grid.hpp"
#include "fdchk/matrix_field.hpp"
#include "fdchk/pde.hpp"
#include "fdchk/phi.hpp"
#include "fdchk/toml.hpp"

namespace fdchk {

struct TimeSpec {
  double dt = 1e-3;
  int steps = 100;
  double tol = 1e-12;
};

struct InitialSpec {
  std::string re = "0";
  std::string im = "0";
};

struct RunConfig {
  std::optional<PhiSpec> phi;
  std::optional<MatrixField> matrix;
  std::optional<GridDomain> domain;
  std::optional<InitialSpec> initial;
  std::optional<TimeSpec> time;
  ProbeOptions probe;
  SampleSpec sample;
  std::string hash;  // of the source text

  const PhiSpec& require_phi() const;
  const MatrixField& require_matrix() const;
  const GridDomain& require_domain() const;
  const InitialSpec& require_initial() const;
  const TimeSpec& require_time() const;
};

RunConfig config_from_toml(const toml::Value& root, std::string_view source_text = {});
RunConfig load_config(const std::string& path);

MatrixField matrix_from_toml(const toml::Value& table);
GridDomain domain_from_toml(const toml::Value& table);

/// "fnv1a64:" followed by 16 hex digits.
std::string content_hash(std::string_view text);

}  // namespace fdchk

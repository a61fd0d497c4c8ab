#pragma once

// JSON, CSV and text renderings of every result type. Reports are JSON
// objects first; the CSV and text forms are flattenings of the same object,
// except trajectories whose CSV is the time series.

#include <optional>
#include <string>

#include <json.hpp>

#include "fdchk/criterion.hpp"
#include "fdchk/orlicz.hpp"
#include "fdchk/pde.hpp"

namespace fdchk {

using json = nlohmann::json;

inline constexpr const char* kSchema = "fdchk/1";
inline constexpr const char* kVersion = "0.1.0";

enum class Format { json, csv, text };
Format format_from_string(std::string_view s);

struct Provenance {
  std::string command;
  std::string config_hash;
  std::optional<GridDomain> grid;
  json tolerances = json::object();
  std::optional<std::uint64_t> seed;
  bool timestamp = true;
};

/// Finite numbers stay numbers; ±∞ and NaN become "inf", "-inf", "nan".
json number(double v);

json to_json(const PhiSpec& phi);
json to_json(const ValidationReport& r);
json to_json(const Lambda0Result& r);
json to_json(const TailLimits& t);
json to_json(const Witness& w);
json to_json(const CriterionReport& r);
json to_json(const ProbeResult& r, const GridDomain& d);
json to_json(const Trajectory& t);
json to_json(const GridDomain& d);

/// Wraps a body with "schema" and "provenance".
json make_report(const Provenance& p, json body);

/// Renders a report. For trajectories pass the trajectory to get the
/// t, orlicz_integral, luxemburg_norm, l2_norm series as CSV.
std::string render(const json& report, Format f, const Trajectory* trajectory = nullptr);

std::string trajectory_csv(const Trajectory& t);

}  // namespace fdchk

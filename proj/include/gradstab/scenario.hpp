#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "gradstab/stability.hpp"

namespace gradstab {

/// Parsed scenario: group + model descriptors, point/direction payloads, the
/// command to run, and numeric parameters.
struct Scenario {
  std::string command;
  SetupPtr setup;
  std::optional<ModelSpace> model;
  std::optional<ModelPoint> point;
  std::optional<Direction> direction;
  std::vector<ModelPoint> extra_points;  // stratify input grid
  std::optional<GroupElement> element;

  double tol = 1e-8;
  double t_max = 40.0;
  int budget = 20000;
  std::uint64_t seed = 42;
  int sweep = 2000;
  int samples = 101;
  int grid = 100;
  double t = 1.0;

  nlohmann::json echo;  // canonical echo of the parsed input
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

struct Report {
  nlohmann::json body;
  int exit_code = 0;
};

struct RunOptions {
  std::optional<std::string> trace_path;
  std::string format = "json";  // json | csv
  bool timing = false;
};

/// Dispatches the scenario command and assembles the report.
Report run_scenario(const Scenario& scenario, const RunOptions& opts = {});

/// Serializes a report deterministically (2-space indent for json, flat
/// key,value lines for csv).
std::string render_report(const Report& report, const std::string& format);

/// Writes the flow trace CSV: header t,lambda,speed2,f then one row per
/// sample at full double precision, LF line endings.
void export_trace(const FlowTrajectory& trajectory, std::ostream& os);
void export_trace(const FlowTrajectory& trajectory, const std::string& path);

struct VerifyOptions {
  std::uint64_t seed = 42;
  int sweep = 2000;
  double tol = 1e-8;
  int budget = 20000;
};

/// Runs the whole invariant suite with seeded sampling and returns the
/// per-check residual report.  Deterministic for a fixed seed.
nlohmann::json run_verify_suite(const VerifyOptions& opts);

}  // namespace gradstab

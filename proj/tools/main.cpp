#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gradstab/scenario.hpp"

using namespace gradstab;

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis for reductive matrix group actions"};
  std::string scenario_path;
  std::optional<double> tol, t_max;
  std::optional<int> budget, sweep;
  std::optional<std::uint64_t> seed;
  std::string report_format = "json";
  std::string trace_path;
  bool timing = false;

  app.add_option("scenario", scenario_path, "Scenario JSON file")->required();
  app.add_option("--tol", tol, "Convergence tolerance");
  app.add_option("--t-max", t_max, "Flow horizon");
  app.add_option("--budget", budget, "Iteration budget");
  app.add_option("--seed", seed, "Sampling seed");
  app.add_option("--sweep", sweep, "Direction sweep size");
  app.add_option("--trace", trace_path, "Write the flow trace CSV here");
  app.add_option("--report", report_format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", timing, "Include wall-clock timing in the report");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(scenario_path);
    if (!in) throw ParseError("cannot open scenario file: " + scenario_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const std::exception& e) {
      throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
    if (tol) doc["params"]["tol"] = *tol;
    if (t_max) doc["params"]["t_max"] = *t_max;
    if (budget) doc["params"]["budget"] = *budget;
    if (seed) doc["params"]["seed"] = *seed;
    if (sweep) doc["params"]["sweep"] = *sweep;

    Scenario scenario = parse_scenario(doc);
    RunOptions opts;
    if (!trace_path.empty()) opts.trace_path = trace_path;
    opts.format = report_format;
    opts.timing = timing;

    auto start = std::chrono::steady_clock::now();
    Report report = run_scenario(scenario, opts);
    if (timing) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
      report.body["timing_ms"] = ms;
    }
    std::cout << render_report(report, report_format);
    return report.exit_code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const UndecidedError& e) {
    std::cerr << "undecided: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "signalsim/signalsim.hpp"

namespace signalsim::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kConfigError = 3,
  kRuntimeError = 4,
};

inline constexpr std::string_view kBuiltinPrefix = "builtin:";

// "builtin:simNN" selects a suite scenario; anything else is a file path.
inline ScenarioConfig load_scenario(const std::string& ref) {
  if (ref.rfind(kBuiltinPrefix, 0) == 0) {
    const auto name = ref.substr(kBuiltinPrefix.size());
    for (auto& s : builtin_suite()) {
      if (s.name == name) return s;
    }
    throw ConfigError(ConfigErrorKind::MissingFile, ref + ": no such built-in scenario");
  }
  return parse_scenario(ref);
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

inline void write_report(const std::filesystem::path& dir, const ComparisonReport& report) {
  std::filesystem::create_directories(dir);
  auto runs = open_output(dir / "runs.csv");
  write_runs_csv(runs, report.runs);
  auto summary = open_output(dir / "summary.csv");
  write_summary_csv(summary, report);
  auto json = open_output(dir / "summary.json");
  json << summary_json(report).dump(2) << '\n';
}

}  // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-way intersection simulator: fixed-time vs adaptive signal control"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::optional<std::uint64_t> seed;
  std::string controller;
  std::string output;
  std::string output_dir;
  bool trace = false;
  int replications = kDefaultReplications;

  auto* run_cmd = app.add_subcommand("run", "Run one scenario with one controller");
  run_cmd->add_option("-s,--scenario", scenario_ref, "Scenario file or builtin:simNN")->required();
  run_cmd->add_option("-c,--controller", controller, "static | adaptive")
      ->required()
      ->check(CLI::IsMember({"static", "adaptive"}));
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("-o,--output", output, "CSV output file (default: stdout)");
  run_cmd->add_flag("--trace", trace, "Also write <output>.trace.jsonl");

  auto* compare_cmd = app.add_subcommand("compare", "Compare both controllers on one scenario");
  compare_cmd->add_option("-s,--scenario", scenario_ref, "Scenario file or builtin:simNN")
      ->required();
  compare_cmd->add_option("--seed", seed, "Override the scenario seed");
  compare_cmd->add_option("-r,--replications", replications)->check(CLI::PositiveNumber);
  compare_cmd->add_option("-o,--output-dir", output_dir, "Directory for runs/summary files")
      ->required();

  auto* suite_cmd = app.add_subcommand("suite", "Run the built-in 15-scenario comparison");
  suite_cmd->add_option("-r,--replications", replications)->check(CLI::PositiveNumber);
  suite_cmd->add_option("-o,--output-dir", output_dir, "Directory for runs/summary files")
      ->required();

  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario");
  validate_cmd->add_option("-s,--scenario", scenario_ref, "Scenario file or builtin:simNN")
      ->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }
  if (trace && output.empty()) {
    err << "usage error: --trace requires --output\n";
    return kUsageError;
  }

  try {
    if (*validate_cmd) {
      const auto s = load_scenario(scenario_ref);
      out << to_json(s).dump(2) << '\n';
      return kOk;
    }

    if (*suite_cmd) {
      const auto suite = builtin_suite();
      const auto report = run_comparison(suite, replications);
      detail::write_report(output_dir, report);
      write_summary_csv(out, report);
      return kOk;
    }

    auto s = load_scenario(scenario_ref);
    if (seed) s.seed = *seed;

    if (*compare_cmd) {
      const auto report = run_comparison({&s, 1}, replications);
      detail::write_report(output_dir, report);
      write_summary_csv(out, report);
      return kOk;
    }

    RunOptions opt;
    std::ofstream trace_file;
    if (trace) {
      trace_file = detail::open_output(output + ".trace.jsonl");
      opt.trace = &trace_file;
    }
    const auto result = run_simulation(s, *parse_controller_kind(controller), opt);
    if (output.empty()) {
      write_runs_csv(out, {&result, 1});
    } else {
      auto f = detail::open_output(output);
      write_runs_csv(f, {&result, 1});
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace signalsim::cli

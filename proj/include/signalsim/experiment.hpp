#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "signalsim/detection.hpp"
#include "signalsim/errors.hpp"
#include "signalsim/scenario.hpp"
#include "signalsim/signal_control.hpp"
#include "signalsim/trace.hpp"
#include "signalsim/world.hpp"

namespace signalsim {

// Which detector feeds the adaptive controller. Noisy applies the scenario's
// NoiseParams (identity by default); GroundTruth bypasses the noise stage.
enum class DetectorMode : std::uint8_t { Noisy, GroundTruth };

struct RunOptions {
  bool check_invariants = false;
  DetectorMode detector = DetectorMode::Noisy;
  std::ostream* trace = nullptr;
  int replication = 0;
  // Invoked after every completed tick.
  std::function<void(const World&, const PhasePlan&)> on_tick;
};

struct PhaseRecord {
  std::int64_t tick = 0;  // green onset
  Direction direction = Direction::Right;
  Millis green{0};

  friend bool operator==(const PhaseRecord&, const PhaseRecord&) = default;
};

struct RunResult {
  std::string scenario;
  int replication = 0;
  ControllerKind controller = ControllerKind::Static;
  std::uint64_t seed = 0;
  PerApproach<std::uint64_t> crossed{};
  std::uint64_t total_crossed = 0;
  std::uint64_t spawned = 0;
  std::uint64_t suppressed = 0;
  std::uint64_t queue_residue = 0;  // still waiting at the end (censored waits)
  double mean_wait = 0.0;           // seconds, spawn to crossing, crossed vehicles only
  std::vector<PhaseRecord> phases;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

namespace detail {

// Checks the controller-side invariants each tick: exclusivity, strict cyclic
// service and staged greens inside [min_green, max_green].
class PhaseMonitor {
 public:
  explicit PhaseMonitor(const ControllerConfig& c) : config_(c) {}

  void check(const PhasePlan& plan, const TickOutcome& outcome, std::int64_t tick) {
    check_phase_exclusivity(plan, tick);
    if (outcome.staged) {
      const double g = to_seconds(*outcome.staged);
      if (g < config_.min_green || g > config_.max_green)
        throw InvariantViolation(tick, "staged green outside [min_green, max_green]");
    }
    if (plan.current() != last_) {
      const auto& order = plan.cycle_order();
      auto at = std::find(order.begin(), order.end(), last_);
      if (order[static_cast<std::size_t>(at - order.begin() + 1) % kNumApproaches] !=
          plan.current())
        throw InvariantViolation(tick, "cyclic service order broken");
      last_ = plan.current();
    }
  }

  void reset(const PhasePlan& plan) { last_ = plan.current(); }

 private:
  ControllerConfig config_;
  Direction last_ = Direction::Right;
};

template <Detector D>
RunResult run_with(const ScenarioConfig& s, ControllerKind kind, const RunOptions& opt,
                   D& detector) {
  World world(s.geometry, s.classes, s.seed);
  PhasePlan plan = PhasePlan::start(kind, s.controller);
  TraceSink trace(opt.trace);
  const auto arrivals = s.arrival_model();
  const auto avg = avg_cross_times(s.classes);

  RunResult r;
  r.scenario = s.name;
  r.replication = opt.replication;
  r.controller = kind;
  r.seed = s.seed;
  r.phases.push_back({0, plan.current(), *plan.signal(plan.current()).remaining});
  for (const auto& c : plan_commands(plan, 0)) trace.signal(0, c.direction, c.color, c.duration);

  WorldInvariantMonitor world_monitor;
  PhaseMonitor phase_monitor(s.controller);
  phase_monitor.reset(plan);

  const auto ticks = s.ticks(world.dt());
  for (std::int64_t t = 0; t < ticks; ++t) {
    spawn_step(world, arrivals, trace);
    const auto outcome = controller_tick(plan, s.controller, avg, world, detector, trace);
    for (const auto& c : outcome.commands) {
      if (c.color == Color::Green) r.phases.push_back({c.tick, c.direction, *c.duration});
    }
    if (opt.check_invariants) phase_monitor.check(plan, outcome, t);

    const auto motion = motion_step(world, plan.colors(), trace);
    if (opt.check_invariants) {
      for (const auto& x : motion.crossings) {
        if (x.signal == Color::Red)
          throw InvariantViolation(t, "vehicle " + std::to_string(x.vehicle) +
                                          " crossed on red");
      }
      world_monitor.check(world);
    }
    if (opt.on_tick) opt.on_tick(world, plan);
  }

  std::int64_t wait_ticks = 0;
  for (auto d : kAllDirections) {
    const auto& c = world.counters(d);
    r.crossed[index(d)] = c.crossed;
    r.total_crossed += c.crossed;
    r.spawned += c.spawned;
    r.suppressed += c.suppressed;
    wait_ticks += c.wait_ticks;
    for (auto n : waiting_counts(world, d)) r.queue_residue += n;
  }
  if (r.total_crossed > 0)
    r.mean_wait = to_seconds(world.dt()) * static_cast<double>(wait_ticks) /
                  static_cast<double>(r.total_crossed);
  return r;
}

}  // namespace detail

/// Runs one scenario for duration / dt ticks. Each tick: spawn, controller,
/// motion. Errors during the run (detector failure, invariant violation when
/// checking is on) propagate as RunAbort subclasses carrying the tick.
inline RunResult run_simulation(const ScenarioConfig& scenario, ControllerKind kind,
                                const RunOptions& options = {}) {
  if (auto errors = validate(scenario); !errors.empty())
    throw ConfigError(ConfigErrorKind::Invalid, scenario.name + ": invalid scenario", errors);
  if (options.detector == DetectorMode::GroundTruth) {
    GroundTruthDetector d;
    return detail::run_with(scenario, kind, options, d);
  }
  NoisyDetector d(scenario.noise, scenario.seed);
  return detail::run_with(scenario, kind, options, d);
}

/// 100 * (adaptive - static) / static. Throws UndefinedBaseline when the
/// static total is not positive.
inline double improvement_percent(double static_total, double adaptive_total) {
  if (!(static_total > 0.0))
    throw UndefinedBaseline("improvement undefined: static baseline crossed no vehicles");
  return 100.0 * (adaptive_total - static_total) / static_total;
}

enum class Regime : std::uint8_t { NearEqual, Uniform, Skewed, Other };

constexpr std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::NearEqual: return "near_equal";
    case Regime::Uniform: return "uniform";
    case Regime::Skewed: return "skewed";
    case Regime::Other: return "other";
  }
  return "?";
}

/// Uniform: every weight exactly 0.25. Skewed: some weight >= 0.6.
/// NearEqual: every weight within 0.05 of 0.25.
inline Regime classify_regime(const PerApproach<double>& w) {
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  if (*lo == 0.25 && *hi == 0.25) return Regime::Uniform;
  if (*hi >= 0.6) return Regime::Skewed;
  if (*lo >= 0.2 && *hi <= 0.3) return Regime::NearEqual;
  return Regime::Other;
}

struct ComparisonRow {
  std::string scenario;
  Regime regime = Regime::Other;
  double static_mean = 0.0;
  double adaptive_mean = 0.0;
  double improvement_percent = 0.0;
};

struct ImprovementSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ComparisonReport {
  int replications = 1;
  std::vector<RunResult> runs;  // sorted by (scenario, replication, controller)
  std::vector<ComparisonRow> rows;  // sorted by scenario
  ImprovementSummary summary;
  std::map<Regime, double> regime_means;  // only regimes present in the input
};

/// Seed used for replication `r` of a scenario.
inline std::uint64_t replication_seed(std::uint64_t base, int r) {
  return base + static_cast<std::uint64_t>(r);
}

/// Runs both controllers on every scenario x replication with paired seeds
/// and reduces to one improvement row per scenario. The result does not
/// depend on the order of `scenarios`.
inline ComparisonReport run_comparison(std::span<const ScenarioConfig> scenarios, int replications,
                                       const RunOptions& options = {}) {
  if (scenarios.empty()) throw ContractViolation("run_comparison needs at least one scenario");
  if (replications < 1) throw ContractViolation("replications must be >= 1");
  std::set<std::string> names;
  for (const auto& s : scenarios) {
    if (!names.insert(s.name).second)
      throw ConfigError(ConfigErrorKind::Invalid, "duplicate scenario name '" + s.name + "'",
                        {"name: duplicate '" + s.name + "'"});
  }

  ComparisonReport report;
  report.replications = replications;
  std::map<std::string, const ScenarioConfig*> by_name;
  for (const auto& s : scenarios) by_name.emplace(s.name, &s);

  for (const auto& [name, sp] : by_name) {
    ComparisonRow row;
    row.scenario = name;
    row.regime = classify_regime(sp->arrival_weights);
    double static_sum = 0.0;
    double adaptive_sum = 0.0;
    for (int r = 0; r < replications; ++r) {
      ScenarioConfig s = *sp;
      s.seed = replication_seed(sp->seed, r);
      RunOptions opt = options;
      opt.replication = r;
      opt.trace = nullptr;
      for (auto kind : {ControllerKind::Static, ControllerKind::Adaptive}) {
        RunResult res;
        try {
          res = run_simulation(s, kind, opt);
        } catch (const RunAbort& e) {
          const auto where = "scenario '" + name + "' replication " + std::to_string(r) + " (" +
                             std::string(to_string(kind)) + "): " + e.detail();
          if (dynamic_cast<const DetectorError*>(&e)) throw DetectorError(e.tick(), where);
          if (dynamic_cast<const InvariantViolation*>(&e)) throw InvariantViolation(e.tick(), where);
          throw RunAbort(e.tick(), where);
        }
        (kind == ControllerKind::Static ? static_sum : adaptive_sum) +=
            static_cast<double>(res.total_crossed);
        report.runs.push_back(std::move(res));
      }
    }
    row.static_mean = static_sum / replications;
    row.adaptive_mean = adaptive_sum / replications;
    row.improvement_percent = improvement_percent(row.static_mean, row.adaptive_mean);
    report.rows.push_back(std::move(row));
  }

  auto& sm = report.summary;
  sm.min = sm.max = report.rows.front().improvement_percent;
  double total = 0.0;
  std::map<Regime, std::pair<double, int>> acc;
  for (const auto& row : report.rows) {
    total += row.improvement_percent;
    sm.min = std::min(sm.min, row.improvement_percent);
    sm.max = std::max(sm.max, row.improvement_percent);
    auto& a = acc[row.regime];
    a.first += row.improvement_percent;
    ++a.second;
  }
  sm.mean = total / static_cast<double>(report.rows.size());
  for (const auto& [regime, a] : acc) report.regime_means[regime] = a.first / a.second;
  return report;
}

// ---- output -------------------------------------------------------------

/// Locale-independent fixed-point formatting.
inline std::string format_fixed(double v, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

inline void write_runs_csv_header(std::ostream& out) {
  out << "scenario,replication,controller,right,down,left,up,total,mean_wait,spawned,suppressed,"
         "queue_residue\n";
}

inline void write_run_csv_row(std::ostream& out, const RunResult& r) {
  out << r.scenario << ',' << r.replication << ',' << to_string(r.controller);
  for (auto d : kAllDirections) out << ',' << r.crossed[index(d)];
  out << ',' << r.total_crossed << ',' << format_fixed(r.mean_wait, 3) << ',' << r.spawned << ','
      << r.suppressed << ',' << r.queue_residue << '\n';
}

inline void write_runs_csv(std::ostream& out, std::span<const RunResult> runs) {
  write_runs_csv_header(out);
  for (const auto& r : runs) write_run_csv_row(out, r);
}

inline void write_summary_csv(std::ostream& out, const ComparisonReport& report) {
  out << "scenario,regime,static_mean,adaptive_mean,improvement_percent\n";
  for (const auto& row : report.rows) {
    out << row.scenario << ',' << to_string(row.regime) << ','
        << format_fixed(row.static_mean, 6) << ',' << format_fixed(row.adaptive_mean, 6) << ','
        << format_fixed(row.improvement_percent, 6) << '\n';
  }
}

inline nlohmann::ordered_json summary_json(const ComparisonReport& report) {
  nlohmann::ordered_json j;
  j["replications"] = report.replications;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json o;
    o["scenario"] = row.scenario;
    o["regime"] = to_string(row.regime);
    o["static_mean"] = row.static_mean;
    o["adaptive_mean"] = row.adaptive_mean;
    o["improvement_percent"] = row.improvement_percent;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["improvement"] = {{"mean", report.summary.mean},
                      {"min", report.summary.min},
                      {"max", report.summary.max}};
  nlohmann::ordered_json regimes = nlohmann::ordered_json::object();
  for (auto r : {Regime::NearEqual, Regime::Uniform, Regime::Skewed, Regime::Other}) {
    auto it = report.regime_means.find(r);
    if (it != report.regime_means.end()) regimes[std::string(to_string(r))] = it->second;
  }
  j["regime_means"] = std::move(regimes);
  return j;
}

}  // namespace signalsim

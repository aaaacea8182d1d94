#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signalsim/detection.hpp"
#include "signalsim/errors.hpp"
#include "signalsim/trace.hpp"
#include "signalsim/units.hpp"
#include "signalsim/world.hpp"

namespace signalsim {

enum class ControllerKind : std::uint8_t { Static, Adaptive };

constexpr std::string_view to_string(ControllerKind k) noexcept {
  return k == ControllerKind::Static ? "static" : "adaptive";
}

constexpr std::optional<ControllerKind> parse_controller_kind(std::string_view s) noexcept {
  if (s == "static") return ControllerKind::Static;
  if (s == "adaptive") return ControllerKind::Adaptive;
  return std::nullopt;
}

/// Timing parameters shared by both controllers. All durations in seconds.
struct ControllerConfig {
  double default_green = 20.0;   // first green, before any detection
  double yellow_time = 5.0;
  double min_green = 10.0;
  double max_green = 60.0;
  double static_green = 30.0;    // fixed-time baseline
  double detection_lead = 5.0;   // capture this long before the green ends
  int no_of_lanes = 2;           // lane count in the green-time denominator
  std::array<Direction, kNumApproaches> cycle_order = kAllDirections;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

/// Returns one "path: message" entry per broken rule; empty when valid.
inline std::vector<std::string> validate(const ControllerConfig& c,
                                         std::string_view path = "controller") {
  std::vector<std::string> out;
  const std::string p(path);
  auto whole_positive = [&](const char* name, double v) {
    if (!(v > 0.0))
      out.push_back(p + "." + name + ": must be > 0");
    else if (v != std::floor(v))
      out.push_back(p + "." + name + ": must be a whole number of seconds");
  };
  whole_positive("default_green", c.default_green);
  whole_positive("min_green", c.min_green);
  whole_positive("max_green", c.max_green);
  whole_positive("static_green", c.static_green);
  if (!(c.yellow_time >= 0.0) || c.yellow_time != std::floor(c.yellow_time))
    out.push_back(p + ".yellow_time: must be a non-negative whole number of seconds");
  if (c.min_green > c.max_green) out.push_back(p + ".min_green: must not exceed max_green");
  if (!(c.detection_lead >= 0.0))
    out.push_back(p + ".detection_lead: must be >= 0");
  else if (c.detection_lead > c.min_green)
    out.push_back(p + ".detection_lead: must not exceed min_green");
  if (c.no_of_lanes < 1) out.push_back(p + ".no_of_lanes: must be >= 1");
  std::array<bool, kNumApproaches> seen{};
  for (auto d : c.cycle_order) seen[index(d)] = true;
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    out.push_back(p + ".cycle_order: must list each direction exactly once");
  return out;
}

/// Adaptive green time before clamping:
///   sum over classes of (count * avg_cross_time) / (no_of_lanes + 1)
inline double raw_green_time(const DetectionSnapshot& snapshot,
                             const PerClass<double>& avg_cross_time, int no_of_lanes) {
  double weighted = 0.0;
  for (std::size_t i = 0; i < kNumClasses; ++i)
    weighted += static_cast<double>(snapshot.counts[i]) * avg_cross_time[i];
  return weighted / static_cast<double>(no_of_lanes + 1);
}

/// Clamps to [min_green, max_green] and rounds to whole seconds.
inline double clamped_green_time(double raw, const ControllerConfig& config) {
  return std::round(std::clamp(raw, config.min_green, config.max_green));
}

/// Seconds from now until the next approach should be captured.
inline double capture_instant(double green_remaining, const ControllerConfig& config) {
  return std::max(green_remaining - config.detection_lead, 0.0);
}

// Red signals whose next green depends on a not-yet-staged duration carry no
// remaining time ("pending").
struct SignalState {
  Color color = Color::Red;
  std::optional<Millis> remaining;

  friend bool operator==(const SignalState&, const SignalState&) = default;
};

struct SignalCommand {
  std::int64_t tick = 0;
  Direction direction = Direction::Right;
  Color color = Color::Red;
  std::optional<Millis> duration;

  friend bool operator==(const SignalCommand&, const SignalCommand&) = default;
};

/// Four signal heads plus the cyclic phase pointer.
///
/// Exactly one direction (`current`) is Green or Yellow. Red timers always
/// equal the time until that direction's own next Green as far as the
/// schedule is known.
class PhasePlan {
 public:
  static PhasePlan start(ControllerKind kind, const ControllerConfig& config) {
    PhasePlan p;
    p.kind_ = kind;
    p.cycle_ = config.cycle_order;
    p.position_ = 0;
    const double green = kind == ControllerKind::Static ? config.static_green : config.default_green;
    p.signals_[index(p.current())] = {Color::Green, from_seconds(green)};
    p.reschedule_reds(config);
    return p;
  }

  ControllerKind kind() const noexcept { return kind_; }
  Direction current() const noexcept { return cycle_[position_]; }
  Direction next() const noexcept { return cycle_[(position_ + 1) % kNumApproaches]; }
  const std::array<Direction, kNumApproaches>& cycle_order() const noexcept { return cycle_; }
  const SignalState& signal(Direction d) const noexcept { return signals_[index(d)]; }
  std::optional<Millis> staged_green() const noexcept { return staged_; }

  PerApproach<Color> colors() const noexcept {
    PerApproach<Color> c{};
    for (auto d : kAllDirections) c[index(d)] = signals_[index(d)].color;
    return c;
  }

  /// Records the next phase's green and fills in the red timers it unlocks.
  void stage(Millis green, const ControllerConfig& config) {
    staged_ = green;
    reschedule_reds(config);
  }

  /// Counts every known timer down by `dt`, flooring at zero.
  void elapse(Millis dt) noexcept {
    for (auto& s : signals_) {
      if (s.remaining) s.remaining = std::max(Millis{0}, *s.remaining - dt);
    }
  }

  friend PhasePlan advance(const PhasePlan& plan, const ControllerConfig& config,
                           std::optional<Millis> staged_green);

  friend bool operator==(const PhasePlan&, const PhasePlan&) = default;

 private:
  Millis yellow(const ControllerConfig& c) const { return from_seconds(c.yellow_time); }

  // Green duration the direction `steps` places ahead of current will get,
  // if already determined.
  std::optional<Millis> known_green(std::size_t steps, const ControllerConfig& config) const {
    if (kind_ == ControllerKind::Static) return from_seconds(config.static_green);
    if (steps == 1) return staged_;
    return std::nullopt;
  }

  void reschedule_reds(const ControllerConfig& config) {
    const auto& cur = signals_[index(current())];
    std::optional<Millis> until = *cur.remaining;
    if (cur.color == Color::Green) *until += yellow(config);
    for (std::size_t k = 1; k < kNumApproaches; ++k) {
      auto& s = signals_[index(cycle_[(position_ + k) % kNumApproaches])];
      s.color = Color::Red;
      s.remaining = until;
      if (until) {
        auto g = known_green(k, config);
        if (g)
          *until += *g + yellow(config);
        else
          until.reset();
      }
    }
  }

  ControllerKind kind_ = ControllerKind::Static;
  std::array<Direction, kNumApproaches> cycle_ = kAllDirections;
  std::size_t position_ = 0;
  PerApproach<SignalState> signals_{};
  std::optional<Millis> staged_;
};

/// Moves the expired current signal one step: Green -> Yellow, or
/// Yellow -> Red with the next direction in cycle order turning Green.
/// Throws ContractViolation if the current signal still has time left.
inline PhasePlan advance(const PhasePlan& plan, const ControllerConfig& config,
                         std::optional<Millis> staged_green) {
  const auto& cur = plan.signals_[index(plan.current())];
  if (!cur.remaining || cur.remaining->count() > 0)
    throw ContractViolation("advance called while " + std::string(to_string(plan.current())) +
                            " still has time remaining");
  PhasePlan out = plan;
  auto& s = out.signals_[index(out.current())];
  if (s.color == Color::Green) {
    s = {Color::Yellow, out.yellow(config)};
    if (staged_green) out.staged_ = staged_green;
  } else {
    s.color = Color::Red;
    out.position_ = (out.position_ + 1) % kNumApproaches;
    Millis green;
    if (staged_green)
      green = *staged_green;
    else if (out.kind_ == ControllerKind::Static)
      green = from_seconds(config.static_green);
    else
      green = from_seconds(config.default_green);
    out.signals_[index(out.current())] = {Color::Green, green};
    out.staged_.reset();
  }
  out.reschedule_reds(config);
  return out;
}

struct TickOutcome {
  std::vector<SignalCommand> commands;
  std::optional<DetectionSnapshot> captured;
  std::optional<Millis> staged;
};

/// Signal-change commands describing the plan's state at `tick`, one per
/// direction, current first.
inline std::vector<SignalCommand> plan_commands(const PhasePlan& plan, std::int64_t tick) {
  std::vector<SignalCommand> out;
  const auto& order = plan.cycle_order();
  const auto start = static_cast<std::size_t>(
      std::find(order.begin(), order.end(), plan.current()) - order.begin());
  for (std::size_t k = 0; k < kNumApproaches; ++k) {
    const auto d = order[(start + k) % kNumApproaches];
    const auto& s = plan.signal(d);
    out.push_back({tick, d, s.color, s.remaining});
  }
  return out;
}

/// One controller step at the world's current tick:
///   1. advance any expired phase,
///   2. adaptive only: once the green has at most detection_lead left, capture
///      the next approach, compute its green time and stage it,
///   3. count every timer down by dt.
/// Detector exceptions abort the run as DetectorError at this tick.
template <Detector D>
TickOutcome controller_tick(PhasePlan& plan, const ControllerConfig& config,
                            const PerClass<double>& avg_cross_time, const World& world,
                            D& detector, TraceSink& trace) {
  TickOutcome out;
  const auto tick = world.tick();

  // Captures once per green, as soon as remaining <= detection_lead. Checked
  // before the switch too so a zero lead captures at the switch instant.
  auto maybe_capture = [&] {
    const auto& cur = plan.signal(plan.current());
    if (plan.kind() != ControllerKind::Adaptive || cur.color != Color::Green ||
        plan.staged_green() || *cur.remaining > from_seconds(config.detection_lead))
      return;
    DetectionSnapshot snap;
    try {
      snap = detector.capture(world, plan.next());
    } catch (const RunAbort&) {
      throw;
    } catch (const std::exception& e) {
      throw DetectorError(tick, std::string("detector failed: ") + e.what());
    }
    const double green =
        clamped_green_time(raw_green_time(snap, avg_cross_time, config.no_of_lanes), config);
    plan.stage(from_seconds(green), config);
    out.captured = snap;
    out.staged = from_seconds(green);
    trace.capture(tick, snap.approach, snap.counts, *out.staged);
  };

  maybe_capture();
  while (plan.signal(plan.current()).remaining->count() == 0) {
    const auto before = plan.current();
    plan = advance(plan, config, plan.staged_green());
    const auto& s = plan.signal(before);
    out.commands.push_back({tick, before, s.color, s.remaining});
    trace.signal(tick, before, s.color, s.remaining);
    if (plan.current() != before) {
      const auto& g = plan.signal(plan.current());
      out.commands.push_back({tick, plan.current(), g.color, g.remaining});
      trace.signal(tick, plan.current(), g.color, g.remaining);
    }
  }

  maybe_capture();

  plan.elapse(world.dt());
  const auto rem = *plan.signal(plan.current()).remaining;
  if (rem.count() > 0 && rem.count() % 1000 == 0)
    trace.countdown(tick, plan.current(), plan.signal(plan.current()).color, rem.count() / 1000);
  return out;
}

/// Throws InvariantViolation unless exactly one signal is non-Red and it is
/// the plan's current direction.
inline void check_phase_exclusivity(const PhasePlan& plan, std::int64_t tick) {
  int active = 0;
  for (auto d : kAllDirections) {
    if (plan.signal(d).color != Color::Red) {
      ++active;
      if (d != plan.current())
        throw InvariantViolation(tick, "non-current direction " + std::string(to_string(d)) +
                                           " is not red");
    }
  }
  if (active != 1) throw InvariantViolation(tick, "phase exclusivity broken");
}

}  // namespace signalsim

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "signalsim/errors.hpp"
#include "signalsim/rng.hpp"
#include "signalsim/trace.hpp"
#include "signalsim/units.hpp"
#include "signalsim/vehicle.hpp"

namespace signalsim {

// Per-approach road layout. Every approach has `through_lanes` plus one
// rightmost lane (index `through_lanes`) from which turns are made.
struct Geometry {
  int through_lanes = 2;
  double approach_length = 60.0;  // spawn edge to stop line
  double crossing_length = 20.0;  // stop line to exit for straight movers
  double turn_extra = 10.0;       // extra path length for turners
  double min_gap = 1.0;

  int lanes() const noexcept { return through_lanes + 1; }
  int turn_lane() const noexcept { return through_lanes; }
  double stop_line() const noexcept { return approach_length; }

  double exit_position(const Vehicle& v) const noexcept {
    return stop_line() + crossing_length + (v.will_turn ? turn_extra : 0.0);
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct ArrivalModel {
  PerApproach<double> arrival_weights{0.25, 0.25, 0.25, 0.25};
  double p_arrival = 0.1;  // per tick
  PerClass<double> class_mix{0.5, 0.2, 0.1, 0.1, 0.1};
  double turn_probability = 0.3;

  friend bool operator==(const ArrivalModel&, const ArrivalModel&) = default;
};

struct ApproachCounters {
  std::uint64_t spawned = 0;
  std::uint64_t crossed = 0;  // includes vehicles that later exited
  std::uint64_t exited = 0;
  std::uint64_t suppressed = 0;
  std::int64_t wait_ticks = 0;  // summed spawn-to-cross time of crossed vehicles
};

/// One intersection's vehicles, counters and arrival stream.
///
/// Lanes are stored leader-first: front() is the vehicle furthest along.
/// The tick counter advances only in motion_step, which closes a tick.
class World {
 public:
  World(Geometry geometry, ClassTable classes, std::uint64_t seed, Millis dt = kDefaultTick)
      : geometry_(geometry),
        classes_(classes),
        dt_(dt),
        arrivals_(seed, Stream::Arrivals) {
    if (dt_.count() <= 0) throw ContractViolation("dt must be positive");
    if (geometry_.through_lanes < 1) throw ContractViolation("through_lanes must be >= 1");
    for (auto& lanes : lanes_) lanes.resize(static_cast<std::size_t>(geometry_.lanes()));
  }

  const Geometry& geometry() const noexcept { return geometry_; }
  const ClassTable& classes() const noexcept { return classes_; }
  const VehicleClass& vehicle_class(VehicleKind k) const noexcept { return classes_[index(k)]; }
  Millis dt() const noexcept { return dt_; }
  std::int64_t tick() const noexcept { return tick_; }
  Millis clock() const noexcept { return dt_ * tick_; }

  const std::deque<Vehicle>& lane(Direction d, int lane) const {
    return lanes_[index(d)].at(static_cast<std::size_t>(lane));
  }
  std::deque<Vehicle>& lane(Direction d, int lane) {
    return lanes_[index(d)].at(static_cast<std::size_t>(lane));
  }

  const ApproachCounters& counters(Direction d) const noexcept { return counters_[index(d)]; }
  ApproachCounters& counters(Direction d) noexcept { return counters_[index(d)]; }

  Rng& arrival_rng() noexcept { return arrivals_; }

  std::uint64_t next_id() noexcept { return next_id_++; }

  void advance_tick() noexcept { ++tick_; }

  std::size_t live_count(Direction d) const {
    std::size_t n = 0;
    for (const auto& l : lanes_[index(d)]) n += l.size();
    return n;
  }

  template <class F>
  void for_each_vehicle(F&& f) const {
    for (const auto& approach : lanes_)
      for (const auto& l : approach)
        for (const auto& v : l) f(v);
  }

  /// Inserts a vehicle at an arbitrary position, keeping lane order. Intended
  /// for scripted setups; the vehicle is counted as spawned (and crossed when
  /// its state says so) and gets a fresh id, which is returned. Throws
  /// ContractViolation on overlap or a turner outside the rightmost lane.
  std::uint64_t insert(Vehicle v) {
    if (v.lane < 0 || v.lane >= geometry_.lanes()) throw ContractViolation("lane out of range");
    if (v.will_turn && v.lane != geometry_.turn_lane())
      throw ContractViolation("turning vehicle outside rightmost lane");
    if (v.state == VehicleState::Exited) throw ContractViolation("cannot insert an exited vehicle");
    v.id = next_id_;
    auto& l = lane(v.approach, v.lane);
    auto it = std::find_if(l.begin(), l.end(),
                           [&](const Vehicle& o) { return o.position < v.position; });
    if (it != l.begin()) {
      const auto& leader = *std::prev(it);
      if (v.position > leader.position - vehicle_class(leader.kind).length - geometry_.min_gap)
        throw ContractViolation("inserted vehicle overlaps its leader");
    }
    if (it != l.end()) {
      if (it->position > v.position - vehicle_class(v.kind).length - geometry_.min_gap)
        throw ContractViolation("inserted vehicle overlaps its follower");
    }
    auto& c = counters(v.approach);
    ++c.spawned;
    if (v.state == VehicleState::Crossed) {
      ++c.crossed;
      if (!v.cross_tick) v.cross_tick = tick_;
    }
    ++next_id_;
    l.insert(it, v);
    return v.id;
  }

 private:
  Geometry geometry_;
  ClassTable classes_;
  Millis dt_;
  Rng arrivals_;
  std::int64_t tick_ = 0;
  std::uint64_t next_id_ = 1;
  PerApproach<std::vector<std::deque<Vehicle>>> lanes_;
  PerApproach<ApproachCounters> counters_{};
};

// One tick's arrival draw. Exactly five uniforms are consumed per tick whether
// or not a vehicle arrives, so the arrival stream stays aligned across runs
// that differ only in controller.
struct ArrivalDraw {
  bool arrives = false;
  Direction approach = Direction::Right;
  VehicleKind kind = VehicleKind::Car;
  int lane = 0;
  bool will_turn = false;
};

inline ArrivalDraw draw_arrival(Rng& rng, const ArrivalModel& m, const Geometry& g) {
  const double u_arrive = rng.uniform();
  const double u_approach = rng.uniform();
  const double u_class = rng.uniform();
  const double u_lane = rng.uniform();
  const double u_turn = rng.uniform();

  ArrivalDraw d;
  d.arrives = u_arrive < m.p_arrival;
  d.approach = kAllDirections[Rng::pick(m.arrival_weights, u_approach)];
  d.kind = kAllKinds[Rng::pick(m.class_mix, u_class)];
  const int lanes = g.lanes();
  d.lane = std::min(static_cast<int>(u_lane * lanes), lanes - 1);
  d.will_turn = d.lane == g.turn_lane() && u_turn < m.turn_probability;
  return d;
}

/// Draws this tick's arrival and, if the entry cell is free, places the new
/// vehicle at the spawn edge. Returns the vehicles created (zero or one).
inline std::vector<Vehicle> spawn_step(World& world, const ArrivalModel& model,
                                       TraceSink& trace) {
  std::vector<Vehicle> created;
  const auto draw = draw_arrival(world.arrival_rng(), model, world.geometry());
  if (!draw.arrives) return created;

  auto& lane = world.lane(draw.approach, draw.lane);
  const double min_gap = world.geometry().min_gap;
  if (!lane.empty()) {
    const auto& last = lane.back();
    if (last.position - world.vehicle_class(last.kind).length - min_gap < 0.0) {
      ++world.counters(draw.approach).suppressed;
      trace.suppressed(world.tick(), draw.approach, draw.kind, draw.lane, draw.will_turn);
      return created;
    }
  }

  Vehicle v;
  v.id = world.next_id();
  v.kind = draw.kind;
  v.approach = draw.approach;
  v.lane = draw.lane;
  v.position = 0.0;
  v.speed = world.vehicle_class(draw.kind).cruise_speed;
  v.will_turn = draw.will_turn;
  v.spawn_tick = world.tick();
  lane.push_back(v);
  ++world.counters(draw.approach).spawned;
  trace.spawn(world.tick(), v.id, v.approach, v.kind, v.lane, v.will_turn);
  created.push_back(v);
  return created;
}

inline std::vector<Vehicle> spawn_step(World& world, const ArrivalModel& model) {
  TraceSink none;
  return spawn_step(world, model, none);
}

struct CrossingRecord {
  std::uint64_t vehicle = 0;
  Direction approach = Direction::Right;
  Color signal = Color::Red;  // signal shown to the approach at the crossing tick
};

struct MotionReport {
  std::vector<CrossingRecord> crossings;
  std::size_t exits = 0;
};

/// Advances every vehicle by one tick and closes the tick.
///
/// Each vehicle moves min(cruise_speed * dt, gap-limited distance). A vehicle
/// at or before the stop line may not pass it unless its signal is Green;
/// past the line it proceeds regardless. Crossing the line counts once.
inline MotionReport motion_step(World& world, const PerApproach<Color>& signals,
                                TraceSink& trace) {
  MotionReport report;
  const auto& g = world.geometry();
  const double stop = g.stop_line();
  const double dt = to_seconds(world.dt());

  for (auto d : kAllDirections) {
    const Color color = signals[index(d)];
    for (int li = 0; li < g.lanes(); ++li) {
      auto& lane = world.lane(d, li);
      double limit = std::numeric_limits<double>::infinity();
      for (auto& v : lane) {
        const auto& cls = world.vehicle_class(v.kind);
        double target = std::min(v.position + cls.cruise_speed * dt, limit);
        const bool before_line = v.state == VehicleState::Moving && v.position <= stop;
        if (before_line && color != Color::Green) target = std::min(target, stop);
        target = std::max(target, v.position);

        v.speed = (target - v.position) / dt;
        v.position = target;
        if (v.state == VehicleState::Moving && v.position > stop) {
          v.state = VehicleState::Crossed;
          v.cross_tick = world.tick();
          auto& c = world.counters(d);
          ++c.crossed;
          c.wait_ticks += world.tick() - v.spawn_tick;
          report.crossings.push_back({v.id, d, color});
          trace.cross(world.tick(), v.id, d, v.kind,
                      to_seconds(world.dt() * (world.tick() - v.spawn_tick)));
        }
        limit = v.position - cls.length - g.min_gap;
      }

      // Removal only widens gaps, so exits may leave from mid-lane.
      for (auto it = lane.begin(); it != lane.end();) {
        if (it->state == VehicleState::Crossed && it->position > g.exit_position(*it)) {
          it->state = VehicleState::Exited;
          ++world.counters(d).exited;
          ++report.exits;
          trace.exit(world.tick(), it->id, d, it->kind);
          it = lane.erase(it);
        } else {
          ++it;
        }
      }
    }
  }
  world.advance_tick();
  return report;
}

inline MotionReport motion_step(World& world, const PerApproach<Color>& signals) {
  TraceSink none;
  return motion_step(world, signals, none);
}

/// Per-class count of live vehicles on `d` that have not crossed the stop line.
inline PerClass<std::uint32_t> waiting_counts(const World& world, Direction d) {
  PerClass<std::uint32_t> counts{};
  for (int li = 0; li < world.geometry().lanes(); ++li) {
    for (const auto& v : world.lane(d, li)) {
      if (v.state == VehicleState::Moving) ++counts[index(v.kind)];
    }
  }
  return counts;
}

/// Stateful per-tick checker for the world invariants. Throws
/// InvariantViolation naming the tick and the broken rule.
class WorldInvariantMonitor {
 public:
  void check(const World& world) {
    const auto tick = world.tick();
    const auto& g = world.geometry();
    auto fail = [&](const std::string& what) { throw InvariantViolation(tick, what); };

    for (auto d : kAllDirections) {
      const auto& c = world.counters(d);
      const auto name = std::string(to_string(d));
      std::uint64_t live = 0;
      std::uint64_t live_crossed = 0;
      for (int li = 0; li < g.lanes(); ++li) {
        const auto& lane = world.lane(d, li);
        for (std::size_t i = 0; i < lane.size(); ++i) {
          const auto& v = lane[i];
          ++live;
          if (v.state == VehicleState::Crossed) ++live_crossed;
          if (v.will_turn && v.lane != g.turn_lane())
            fail("turning vehicle " + std::to_string(v.id) + " outside rightmost lane");
          if (v.state == VehicleState::Moving && v.position > g.stop_line())
            fail("vehicle " + std::to_string(v.id) + " past stop line without crossing");
          if (i > 0) {
            const auto& leader = lane[i - 1];
            const double bound =
                leader.position - world.vehicle_class(leader.kind).length - g.min_gap;
            if (v.position > bound + 1e-9)
              fail("overlap in " + name + " lane " + std::to_string(li) + " between vehicles " +
                   std::to_string(leader.id) + " and " + std::to_string(v.id));
          }
          auto [it, inserted] = last_position_.try_emplace(v.id, v.position);
          if (!inserted) {
            if (v.position < it->second) fail("vehicle " + std::to_string(v.id) + " moved backwards");
            it->second = v.position;
          }
        }
      }
      if (c.spawned != live + c.exited) fail("conservation broken on " + name);
      if (c.crossed != live_crossed + c.exited) fail("crossed counter inconsistent on " + name);

      auto& p = previous_[index(d)];
      if (c.spawned < p.spawned || c.crossed < p.crossed || c.exited < p.exited ||
          c.suppressed < p.suppressed)
        fail("counter decreased on " + name);
      p = c;
    }
  }

 private:
  PerApproach<ApproachCounters> previous_{};
  std::unordered_map<std::uint64_t, double> last_position_;
};

}  // namespace signalsim

#pragma once

#include <cstdint>
#include <optional>

#include "signalsim/units.hpp"

namespace signalsim {

struct VehicleClass {
  VehicleKind kind = VehicleKind::Car;
  double length = 4.0;          // meters
  double cruise_speed = 12.0;   // meters / second
  double avg_cross_time = 2.0;  // seconds per vehicle in the green-time formula

  friend bool operator==(const VehicleClass&, const VehicleClass&) = default;
};

using ClassTable = PerClass<VehicleClass>;

// Calibration inputs, not measured values: the per-class crossing times feed
// the adaptive green-time formula directly.
inline ClassTable default_class_table() {
  return {{
      {VehicleKind::Car, 4.0, 12.0, 2.0},
      {VehicleKind::Motorcycle, 2.0, 13.0, 1.0},
      {VehicleKind::Bus, 10.0, 9.0, 2.5},
      {VehicleKind::Truck, 10.0, 9.0, 2.5},
      {VehicleKind::Rickshaw, 3.0, 10.0, 2.25},
  }};
}

inline PerClass<double> avg_cross_times(const ClassTable& t) {
  PerClass<double> out{};
  for (auto k : kAllKinds) out[index(k)] = t[index(k)].avg_cross_time;
  return out;
}

// Forward-only: Moving -> Crossed -> Exited.
enum class VehicleState : std::uint8_t { Moving, Crossed, Exited };

struct Vehicle {
  std::uint64_t id = 0;
  VehicleKind kind = VehicleKind::Car;
  Direction approach = Direction::Right;
  int lane = 0;
  double position = 0.0;  // front bumper, meters from the spawn edge
  double speed = 0.0;     // realized speed over the last step
  bool will_turn = false;
  VehicleState state = VehicleState::Moving;
  std::int64_t spawn_tick = 0;
  std::optional<std::int64_t> cross_tick;
};

}  // namespace signalsim

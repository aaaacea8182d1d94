#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace signalsim {

// Travel direction through the intersection. Each direction is one approach
// with its own signal head.
enum class Direction : std::uint8_t { Right, Down, Left, Up };

enum class VehicleKind : std::uint8_t { Car, Motorcycle, Bus, Truck, Rickshaw };

enum class Color : std::uint8_t { Red, Yellow, Green };

inline constexpr std::size_t kNumApproaches = 4;
inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<Direction, kNumApproaches> kAllDirections{
    Direction::Right, Direction::Down, Direction::Left, Direction::Up};

inline constexpr std::array<VehicleKind, kNumClasses> kAllKinds{
    VehicleKind::Car, VehicleKind::Motorcycle, VehicleKind::Bus, VehicleKind::Truck,
    VehicleKind::Rickshaw};

template <class T>
using PerApproach = std::array<T, kNumApproaches>;

template <class T>
using PerClass = std::array<T, kNumClasses>;

constexpr std::size_t index(Direction d) noexcept { return static_cast<std::size_t>(d); }
constexpr std::size_t index(VehicleKind k) noexcept { return static_cast<std::size_t>(k); }

constexpr std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Right: return "right";
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Up: return "up";
  }
  return "?";
}

constexpr std::string_view to_string(VehicleKind k) noexcept {
  switch (k) {
    case VehicleKind::Car: return "car";
    case VehicleKind::Motorcycle: return "motorcycle";
    case VehicleKind::Bus: return "bus";
    case VehicleKind::Truck: return "truck";
    case VehicleKind::Rickshaw: return "rickshaw";
  }
  return "?";
}

constexpr std::string_view to_string(Color c) noexcept {
  switch (c) {
    case Color::Red: return "red";
    case Color::Yellow: return "yellow";
    case Color::Green: return "green";
  }
  return "?";
}

constexpr std::optional<Direction> parse_direction(std::string_view s) noexcept {
  for (auto d : kAllDirections) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

constexpr std::optional<VehicleKind> parse_vehicle_kind(std::string_view s) noexcept {
  for (auto k : kAllKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

// All simulation time is kept in integer milliseconds so that timers hit zero
// exactly and clock = tick * dt holds without rounding drift.
using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultTick{100};

constexpr double to_seconds(Millis m) noexcept { return static_cast<double>(m.count()) / 1000.0; }

inline Millis from_seconds(double s) {
  return Millis{static_cast<Millis::rep>(std::llround(s * 1000.0))};
}

}  // namespace signalsim

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "signalsim/units.hpp"

namespace signalsim {

/// Line-delimited JSON event trace.
///
/// One object per line, keys always in the order
///   tick, event, vehicle, approach, class, <event-specific fields>
/// with absent leading keys omitted. Event kinds:
///
///   spawn       vehicle, approach, class, lane, turn
///   suppressed  approach, class, lane, turn          (entry cell occupied)
///   cross       vehicle, approach, class, wait        (wait in seconds)
///   exit        vehicle, approach, class
///   signal      approach, color, duration             (seconds; null = pending)
///   capture     approach, counts{class: n}, green     (staged green, seconds)
///   countdown   approach, color, remaining            (whole seconds left)
///
/// A disabled sink (no stream) accepts every call and writes nothing.
class TraceSink {
 public:
  TraceSink() = default;
  explicit TraceSink(std::ostream* out) : out_(out) {}

  bool enabled() const noexcept { return out_ != nullptr; }

  void spawn(std::int64_t tick, std::uint64_t vehicle, Direction d, VehicleKind k, int lane,
             bool turn) {
    if (!out_) return;
    auto j = head(tick, "spawn");
    j["vehicle"] = vehicle;
    j["approach"] = to_string(d);
    j["class"] = to_string(k);
    j["lane"] = lane;
    j["turn"] = turn;
    emit(j);
  }

  void suppressed(std::int64_t tick, Direction d, VehicleKind k, int lane, bool turn) {
    if (!out_) return;
    auto j = head(tick, "suppressed");
    j["approach"] = to_string(d);
    j["class"] = to_string(k);
    j["lane"] = lane;
    j["turn"] = turn;
    emit(j);
  }

  void cross(std::int64_t tick, std::uint64_t vehicle, Direction d, VehicleKind k, double wait) {
    if (!out_) return;
    auto j = head(tick, "cross");
    j["vehicle"] = vehicle;
    j["approach"] = to_string(d);
    j["class"] = to_string(k);
    j["wait"] = wait;
    emit(j);
  }

  void exit(std::int64_t tick, std::uint64_t vehicle, Direction d, VehicleKind k) {
    if (!out_) return;
    auto j = head(tick, "exit");
    j["vehicle"] = vehicle;
    j["approach"] = to_string(d);
    j["class"] = to_string(k);
    emit(j);
  }

  void signal(std::int64_t tick, Direction d, Color c, std::optional<Millis> duration) {
    if (!out_) return;
    auto j = head(tick, "signal");
    j["approach"] = to_string(d);
    j["color"] = to_string(c);
    if (duration)
      j["duration"] = to_seconds(*duration);
    else
      j["duration"] = nullptr;
    emit(j);
  }

  void capture(std::int64_t tick, Direction d, const PerClass<std::uint32_t>& counts,
               Millis staged_green) {
    if (!out_) return;
    auto j = head(tick, "capture");
    j["approach"] = to_string(d);
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (auto k : kAllKinds) c[std::string(to_string(k))] = counts[index(k)];
    j["counts"] = std::move(c);
    j["green"] = to_seconds(staged_green);
    emit(j);
  }

  void countdown(std::int64_t tick, Direction d, Color c, std::int64_t remaining_seconds) {
    if (!out_) return;
    auto j = head(tick, "countdown");
    j["approach"] = to_string(d);
    j["color"] = to_string(c);
    j["remaining"] = remaining_seconds;
    emit(j);
  }

 private:
  static nlohmann::ordered_json head(std::int64_t tick, const char* kind) {
    nlohmann::ordered_json j;
    j["tick"] = tick;
    j["event"] = kind;
    return j;
  }

  void emit(const nlohmann::ordered_json& j) { *out_ << j.dump() << '\n'; }

  std::ostream* out_ = nullptr;
};

}  // namespace signalsim

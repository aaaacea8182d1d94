#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "signalsim/detection.hpp"
#include "signalsim/errors.hpp"
#include "signalsim/signal_control.hpp"
#include "signalsim/vehicle.hpp"
#include "signalsim/world.hpp"

namespace signalsim {

inline constexpr int kScenarioSchemaVersion = 1;

// Upper bound on the mean spurious detections per class and snapshot.
inline constexpr double kMaxFalsePerSnapshot = 50.0;

/// Everything needed to reproduce one simulation run.
struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 300.0;  // seconds
  PerApproach<double> arrival_weights{0.25, 0.25, 0.25, 0.25};
  double p_arrival = 0.1;  // per-tick spawn probability
  PerClass<double> class_mix{0.5, 0.2, 0.1, 0.1, 0.1};
  double turn_probability = 0.3;
  ControllerConfig controller;
  NoiseParams noise;
  std::uint64_t seed = 1;
  Geometry geometry;
  ClassTable classes = default_class_table();

  ArrivalModel arrival_model() const {
    return {arrival_weights, p_arrival, class_mix, turn_probability};
  }

  std::int64_t ticks(Millis dt = kDefaultTick) const {
    return from_seconds(duration) / dt;
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

inline bool sums_to_one(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x;
  return std::abs(s - 1.0) <= 1e-9;
}

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

/// Every broken invariant as "field.path: message"; empty when valid.
inline std::vector<std::string> validate(const ScenarioConfig& s) {
  std::vector<std::string> out;
  if (s.name.empty()) out.push_back("name: must not be empty");
  if (!(s.duration > 0.0))
    out.push_back("duration: must be > 0");
  else if (from_seconds(s.duration) % kDefaultTick != Millis{0})
    out.push_back("duration: must be a multiple of the 0.1 s tick");

  for (std::size_t i = 0; i < kNumApproaches; ++i) {
    if (!detail::is_probability(s.arrival_weights[i]))
      out.push_back("arrival_weights[" + std::to_string(i) + "]: must be in [0, 1]");
  }
  if (!detail::sums_to_one(s.arrival_weights))
    out.push_back("arrival_weights: must sum to 1 (within 1e-9)");
  if (!detail::is_probability(s.p_arrival)) out.push_back("p_arrival: must be in [0, 1]");

  for (auto k : kAllKinds) {
    if (!detail::is_probability(s.class_mix[index(k)]))
      out.push_back("class_mix." + std::string(to_string(k)) + ": must be in [0, 1]");
  }
  if (!detail::sums_to_one(s.class_mix)) out.push_back("class_mix: must sum to 1 (within 1e-9)");
  if (!detail::is_probability(s.turn_probability))
    out.push_back("turn_probability: must be in [0, 1]");

  auto controller = validate(s.controller, "controller");
  out.insert(out.end(), controller.begin(), controller.end());

  for (auto k : kAllKinds) {
    const auto name = std::string(to_string(k));
    if (!detail::is_probability(s.noise.detect_prob[index(k)]))
      out.push_back("noise.detect_prob." + name + ": must be in [0, 1]");
    const double f = s.noise.false_per_snapshot[index(k)];
    if (!(f >= 0.0 && f <= kMaxFalsePerSnapshot))
      out.push_back("noise.false_per_snapshot." + name + ": must be in [0, 50]");
  }

  const auto& g = s.geometry;
  if (g.through_lanes < 1) out.push_back("geometry.through_lanes: must be >= 1");
  if (!(g.approach_length > 0.0)) out.push_back("geometry.approach_length: must be > 0");
  if (!(g.crossing_length > 0.0)) out.push_back("geometry.crossing_length: must be > 0");
  if (!(g.turn_extra >= 0.0)) out.push_back("geometry.turn_extra: must be >= 0");
  if (!(g.min_gap >= 0.0)) out.push_back("geometry.min_gap: must be >= 0");

  for (auto k : kAllKinds) {
    const auto& c = s.classes[index(k)];
    const auto base = "classes." + std::string(to_string(k));
    if (c.kind != k) out.push_back(base + ".kind: table entry out of order");
    if (!(c.length > 0.0)) out.push_back(base + ".length: must be > 0");
    if (!(c.cruise_speed > 0.0)) out.push_back(base + ".cruise_speed: must be > 0");
    if (!(c.avg_cross_time > 0.0)) out.push_back(base + ".avg_cross_time: must be > 0");
  }
  return out;
}

/// Serializes every field, including defaults, with a fixed key order.
inline nlohmann::ordered_json to_json(const ScenarioConfig& s) {
  using nlohmann::ordered_json;
  auto per_class = [](const PerClass<double>& v) {
    ordered_json o = ordered_json::object();
    for (auto k : kAllKinds) o[std::string(to_string(k))] = v[index(k)];
    return o;
  };

  ordered_json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = s.name;
  j["duration"] = s.duration;
  j["seed"] = s.seed;
  j["arrival_weights"] = s.arrival_weights;
  j["p_arrival"] = s.p_arrival;
  j["class_mix"] = per_class(s.class_mix);
  j["turn_probability"] = s.turn_probability;

  ordered_json c;
  c["default_green"] = s.controller.default_green;
  c["yellow_time"] = s.controller.yellow_time;
  c["min_green"] = s.controller.min_green;
  c["max_green"] = s.controller.max_green;
  c["static_green"] = s.controller.static_green;
  c["detection_lead"] = s.controller.detection_lead;
  c["no_of_lanes"] = s.controller.no_of_lanes;
  ordered_json order = ordered_json::array();
  for (auto d : s.controller.cycle_order) order.push_back(to_string(d));
  c["cycle_order"] = std::move(order);
  j["controller"] = std::move(c);

  ordered_json n;
  n["detect_prob"] = per_class(s.noise.detect_prob);
  n["false_per_snapshot"] = per_class(s.noise.false_per_snapshot);
  j["noise"] = std::move(n);

  ordered_json g;
  g["through_lanes"] = s.geometry.through_lanes;
  g["approach_length"] = s.geometry.approach_length;
  g["crossing_length"] = s.geometry.crossing_length;
  g["turn_extra"] = s.geometry.turn_extra;
  g["min_gap"] = s.geometry.min_gap;
  j["geometry"] = std::move(g);

  ordered_json classes = ordered_json::object();
  for (auto k : kAllKinds) {
    const auto& vc = s.classes[index(k)];
    ordered_json e;
    e["length"] = vc.length;
    e["cruise_speed"] = vc.cruise_speed;
    e["avg_cross_time"] = vc.avg_cross_time;
    classes[std::string(to_string(k))] = std::move(e);
  }
  j["classes"] = std::move(classes);
  return j;
}

namespace detail {

// Reads optional fields out of a JSON object, recording type errors and
// unknown keys against their full path instead of stopping at the first.
class FieldReader {
 public:
  FieldReader(const nlohmann::json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  bool is_object() const { return obj_.is_object(); }

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  void reject_unknown(std::initializer_list<std::string_view> known) const {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      bool ok = false;
      for (auto k : known) ok = ok || k == key;
      if (!ok) errors_.push_back(at(key) + ": unknown field");
    }
  }

  const nlohmann::json* find(std::string_view key) const {
    if (!obj_.is_object()) return nullptr;
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(std::string_view key, double& dst) const {
    if (auto* v = find(key)) {
      if (v->is_number())
        dst = v->get<double>();
      else
        errors_.push_back(at(key) + ": expected a number");
    }
  }

  template <class Int>
  void integer(std::string_view key, Int& dst) const {
    if (auto* v = find(key)) {
      if (v->is_number_integer() && (std::is_signed_v<Int> || v->get<std::int64_t>() >= 0))
        dst = v->get<Int>();
      else
        errors_.push_back(at(key) + (std::is_signed_v<Int> ? ": expected an integer"
                                                           : ": expected a non-negative integer"));
    }
  }

  void string(std::string_view key, std::string& dst) const {
    if (auto* v = find(key)) {
      if (v->is_string())
        dst = v->get<std::string>();
      else
        errors_.push_back(at(key) + ": expected a string");
    }
  }

  template <std::size_t N>
  void number_array(std::string_view key, std::array<double, N>& dst) const {
    if (auto* v = find(key)) {
      if (!v->is_array() || v->size() != N) {
        errors_.push_back(at(key) + ": expected an array of " + std::to_string(N) + " numbers");
        return;
      }
      for (std::size_t i = 0; i < N; ++i) {
        if ((*v)[i].is_number())
          dst[i] = (*v)[i].get<double>();
        else
          errors_.push_back(at(key) + "[" + std::to_string(i) + "]: expected a number");
      }
    }
  }

  void per_class(std::string_view key, PerClass<double>& dst) const {
    if (auto* v = find(key)) {
      FieldReader sub = child(key, *v);
      if (!sub.is_object()) return;
      sub.reject_unknown({"car", "motorcycle", "bus", "truck", "rickshaw"});
      for (auto k : kAllKinds) sub.number(to_string(k), dst[index(k)]);
    }
  }

  FieldReader child(std::string_view key, const nlohmann::json& v) const {
    if (!v.is_object()) errors_.push_back(at(key) + ": expected an object");
    return FieldReader(v, at(key), errors_);
  }

 private:
  const nlohmann::json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
};

}  // namespace detail

/// Parses scenario JSON text. Omitted fields take their defaults; every type
/// error, unknown field and broken invariant is reported together.
inline ScenarioConfig parse_scenario_text(std::string_view text, std::string_view source = "<text>") {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigErrorKind::Syntax,
                      std::string(source) + ": malformed scenario: " + e.what());
  }
  if (!root.is_object())
    throw ConfigError(ConfigErrorKind::Syntax,
                      std::string(source) + ": malformed scenario: top level must be an object");

  std::vector<std::string> errors;
  ScenarioConfig s;
  detail::FieldReader top(root, "", errors);
  top.reject_unknown({"schema_version", "name", "duration", "seed", "arrival_weights", "p_arrival",
                      "class_mix", "turn_probability", "controller", "noise", "geometry",
                      "classes"});

  int version = kScenarioSchemaVersion;
  top.integer("schema_version", version);
  if (version != kScenarioSchemaVersion)
    errors.push_back("schema_version: unsupported version " + std::to_string(version));

  top.string("name", s.name);
  top.number("duration", s.duration);
  top.integer("seed", s.seed);
  top.number_array("arrival_weights", s.arrival_weights);
  top.number("p_arrival", s.p_arrival);
  top.per_class("class_mix", s.class_mix);
  top.number("turn_probability", s.turn_probability);

  if (auto* v = top.find("controller")) {
    auto c = top.child("controller", *v);
    c.reject_unknown({"default_green", "yellow_time", "min_green", "max_green", "static_green",
                      "detection_lead", "no_of_lanes", "cycle_order"});
    auto& cc = s.controller;
    c.number("default_green", cc.default_green);
    c.number("yellow_time", cc.yellow_time);
    c.number("min_green", cc.min_green);
    c.number("max_green", cc.max_green);
    c.number("static_green", cc.static_green);
    c.number("detection_lead", cc.detection_lead);
    c.integer("no_of_lanes", cc.no_of_lanes);
    if (auto* order = c.find("cycle_order")) {
      bool ok = order->is_array() && order->size() == kNumApproaches;
      for (std::size_t i = 0; ok && i < kNumApproaches; ++i) {
        auto d = (*order)[i].is_string() ? parse_direction((*order)[i].get<std::string>())
                                         : std::nullopt;
        if (d)
          cc.cycle_order[i] = *d;
        else
          ok = false;
      }
      if (!ok)
        errors.push_back(
            "controller.cycle_order: expected 4 of \"right\", \"down\", \"left\", \"up\"");
    }
  }

  if (auto* v = top.find("noise")) {
    auto n = top.child("noise", *v);
    n.reject_unknown({"detect_prob", "false_per_snapshot"});
    n.per_class("detect_prob", s.noise.detect_prob);
    n.per_class("false_per_snapshot", s.noise.false_per_snapshot);
  }

  if (auto* v = top.find("geometry")) {
    auto g = top.child("geometry", *v);
    g.reject_unknown({"through_lanes", "approach_length", "crossing_length", "turn_extra", "min_gap"});
    g.integer("through_lanes", s.geometry.through_lanes);
    g.number("approach_length", s.geometry.approach_length);
    g.number("crossing_length", s.geometry.crossing_length);
    g.number("turn_extra", s.geometry.turn_extra);
    g.number("min_gap", s.geometry.min_gap);
  }

  if (auto* v = top.find("classes")) {
    auto cl = top.child("classes", *v);
    cl.reject_unknown({"car", "motorcycle", "bus", "truck", "rickshaw"});
    for (auto k : kAllKinds) {
      if (auto* e = cl.find(to_string(k))) {
        auto r = cl.child(to_string(k), *e);
        r.reject_unknown({"length", "cruise_speed", "avg_cross_time"});
        auto& vc = s.classes[index(k)];
        r.number("length", vc.length);
        r.number("cruise_speed", vc.cruise_speed);
        r.number("avg_cross_time", vc.avg_cross_time);
      }
    }
  }

  // Fields with type errors keep their defaults, so invariant checks still
  // run and every problem is reported in one pass.
  const auto broken = validate(s);
  errors.insert(errors.end(), broken.begin(), broken.end());
  if (!errors.empty()) {
    std::string msg = std::string(source) + ": invalid scenario";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(ConfigErrorKind::Invalid, msg, errors);
  }
  return s;
}

inline ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorKind::MissingFile, path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace signalsim

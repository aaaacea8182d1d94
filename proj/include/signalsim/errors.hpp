#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace signalsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConfigErrorKind { MissingFile, Syntax, Invalid };

// Scenario loading failure. For Invalid, `violations` holds one
// "field.path: message" entry per broken rule.
class ConfigError : public Error {
 public:
  ConfigError(ConfigErrorKind kind, std::string message, std::vector<std::string> violations = {})
      : Error(std::move(message)), kind_(kind), violations_(std::move(violations)) {}

  ConfigErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  ConfigErrorKind kind_;
  std::vector<std::string> violations_;
};

// A caller broke an operation's precondition (e.g. advancing a live phase).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class UndefinedBaseline : public Error {
 public:
  using Error::Error;
};

// Base for failures that abort a run at a known tick.
class RunAbort : public Error {
 public:
  RunAbort(std::int64_t tick, const std::string& detail)
      : Error("tick " + std::to_string(tick) + ": " + detail), tick_(tick), detail_(detail) {}

  std::int64_t tick() const noexcept { return tick_; }
  // Message without the tick prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::int64_t tick_;
  std::string detail_;
};

class DetectorError : public RunAbort {
 public:
  using RunAbort::RunAbort;
};

class InvariantViolation : public RunAbort {
 public:
  using RunAbort::RunAbort;
};

}  // namespace signalsim

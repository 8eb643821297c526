#pragma once

#include <stdexcept>
#include <string>

namespace hybridcomp {

/// Constraint families of the joint energy-minimization problem. Numbers in
/// the enumerator comments refer to the residual slots of FeasibilityReport.
enum class ConstraintFamily {
  Schedule,      // one-UE-per-slot scheduling weights
  EdgePower,     // per-slot edge transmit power budget
  AircompPower,  // per-slot AirComp transmit power budget
  Mse,           // per-slot aggregation accuracy threshold
  Data,          // per-UE total offloaded data demand
  Capacity,      // per-slot BS processing capacity
  Rate,          // per-slot achievable-rate limit on offloaded bits
  Coupling,      // offloaded bits only on scheduled slots
};

const char* constraint_family_name(ConstraintFamily f);

/// Malformed or out-of-range configuration input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The instance admits no feasible point (or none was constructible);
/// carries the binding constraint family.
class InfeasibleInstanceError : public std::runtime_error {
 public:
  InfeasibleInstanceError(ConstraintFamily family, const std::string& what)
      : std::runtime_error(what), family_(family) {}
  ConstraintFamily family() const { return family_; }

 private:
  ConstraintFamily family_;
};

/// File-system level failure (unwritable path, parse error on read-back).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hybridcomp

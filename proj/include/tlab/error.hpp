#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlab {

enum class ErrorKind {
  InvalidInput,
  NonConvergence,
  SingularJacobian,
  SingularSystem,
  MultiplicityBroken,
  AmbiguousClassification,
  OrbitCollision,
  DivergenceDetected,
  CriticalValueCollision,
  CaseMismatch,
  Inconclusive,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the
// CLI exit-code mapping) can triage without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::InvalidInput, message);
}

}  // namespace tlab

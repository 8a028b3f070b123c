#pragma once

#include <string>

namespace tlab {

// A coordinate direction of the critical-value chart. Polynomial charts use
// only Value slots; rational charts add sigma, b and, for critical points
// whose value is infinite, the reciprocal value 1/v_k.
enum class SlotKind { Sigma, B, Value, Reciprocal };

struct Slot {
  SlotKind kind = SlotKind::Value;
  int index = 0;  // 0-based critical index for Value / Reciprocal

  static Slot sigma() { return {SlotKind::Sigma, 0}; }
  static Slot b() { return {SlotKind::B, 0}; }
  static Slot value(int k) { return {SlotKind::Value, k}; }
  static Slot reciprocal(int k) { return {SlotKind::Reciprocal, k}; }

  // Human-readable, 1-based label: "sigma", "b", "v1", "1/v3".
  std::string label() const {
    switch (kind) {
      case SlotKind::Sigma: return "sigma";
      case SlotKind::B: return "b";
      case SlotKind::Value: return "v" + std::to_string(index + 1);
      case SlotKind::Reciprocal: return "1/v" + std::to_string(index + 1);
    }
    return "?";
  }

  friend bool operator==(const Slot&, const Slot&) = default;
};

}  // namespace tlab

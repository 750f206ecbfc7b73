// Sample types flowing through dataflow ports. Ports are typed by PortKind
// and only accept samples of the matching kind.
#pragma once

#include <optional>
#include <string>
#include <variant>

#include "math.hpp"

namespace itflow {

enum class PortKind { Locator, Valuator, Button, Pick };

inline const char* to_string(PortKind kind) {
  switch (kind) {
    case PortKind::Locator: return "Locator";
    case PortKind::Valuator: return "Valuator";
    case PortKind::Button: return "Button";
    case PortKind::Pick: return "Pick";
  }
  return "Unknown";
}

// 6-DOF pose sample.
struct Locator {
  math::Vec3 position;
  math::Quat orientation;
};

struct Valuator {
  double value = 0.0;
};

struct Button {
  std::string id;
  bool pressed = false;
};

// Selection sample; empty target means "nothing selected".
struct Pick {
  std::optional<std::string> target;
};

using Sample = std::variant<Locator, Valuator, Button, Pick>;

inline PortKind kind_of(const Sample& s) {
  switch (s.index()) {
    case 0: return PortKind::Locator;
    case 1: return PortKind::Valuator;
    case 2: return PortKind::Button;
    default: return PortKind::Pick;
  }
}

// Timestamped sample attributed to a virtual input device.
struct DeviceSample {
  std::string device;
  double timestamp = 0.0;
  Sample sample;
};

// Pointing convention: a locator looks down its local -Z axis.
inline math::Vec3 forward_axis(const math::Quat& q) { return math::rotate(q, {0.0, 0.0, -1.0}); }

}  // namespace itflow

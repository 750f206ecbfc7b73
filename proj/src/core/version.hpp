#pragma once

namespace itflow {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace itflow

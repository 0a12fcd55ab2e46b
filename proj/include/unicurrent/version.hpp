#pragma once

namespace unicurrent {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace unicurrent

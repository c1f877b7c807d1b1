#pragma once

namespace dum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dum

#pragma once

namespace farsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace farsim

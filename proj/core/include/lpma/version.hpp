#pragma once

namespace lpma {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lpma

#pragma once

namespace nhqw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nhqw

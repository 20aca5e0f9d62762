#pragma once

namespace shifterr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace shifterr

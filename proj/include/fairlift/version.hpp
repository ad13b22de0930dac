#pragma once

namespace fairlift {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fairlift

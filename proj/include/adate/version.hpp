#pragma once

namespace adate {

inline constexpr int kVersionMajor = 0;
inline constexpr int kVersionMinor = 1;
inline constexpr const char* kVersionString = "0.1.0";

}  // namespace adate

#pragma once

namespace shardbench {

inline constexpr const char* kToolName = "shardbench";
inline constexpr const char* kVersionString = "0.1.0";

}  // namespace shardbench

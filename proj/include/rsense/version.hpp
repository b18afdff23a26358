#pragma once

namespace rsense {

inline constexpr const char* kToolName = "residue-sense";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rsense

#pragma once

namespace hyplyap {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hyplyap

#pragma once

namespace tctank {

inline constexpr const char* version = "0.1.0";

} // namespace tctank

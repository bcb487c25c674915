#pragma once

namespace omsense {

inline constexpr const char* version = "0.1.0";

}  // namespace omsense

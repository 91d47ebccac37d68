#pragma once

namespace nilspec {

inline constexpr const char* version = "0.1.0";

}  // namespace nilspec

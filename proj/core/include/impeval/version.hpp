#pragma once

namespace impeval {

inline constexpr const char* kVersion = "0.1.0";

} // namespace impeval

#pragma once

namespace labelscape {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace labelscape

#pragma once

namespace freewalk {
inline constexpr const char* kVersion = "0.1.0";
}

#pragma once

namespace pfdr {
inline constexpr const char* kVersion = "0.1.0";
}

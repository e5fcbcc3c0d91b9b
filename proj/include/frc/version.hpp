#pragma once

namespace frc {
inline constexpr const char* kVersion = "0.1.0";
}

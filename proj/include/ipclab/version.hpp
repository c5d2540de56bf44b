#pragma once

namespace ipclab {
inline constexpr const char* kVersion = "1.0.0";
}

#pragma once

namespace ntheight {

inline constexpr const char* kLibraryVersion = "0.4.0";

} // namespace ntheight

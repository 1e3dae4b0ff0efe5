#pragma once

namespace tacsole {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tacsole

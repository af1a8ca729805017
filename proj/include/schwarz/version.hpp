#pragma once

namespace schwarz {

inline constexpr const char* kVersion = "0.1.0";

} // namespace schwarz

#pragma once

namespace bsymp {
inline constexpr const char* kVersion = "0.1.0";
}

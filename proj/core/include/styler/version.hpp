#pragma once

namespace styler {

inline constexpr const char* kToolVersion = "styler 0.1.0";

}  // namespace styler

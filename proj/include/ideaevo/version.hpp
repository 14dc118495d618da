#pragma once

namespace ideaevo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ideaevo

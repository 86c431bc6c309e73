#pragma once

namespace dimwitness {

inline constexpr const char* kVersion = "0.1.0";

} // namespace dimwitness

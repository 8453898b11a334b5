#pragma once

namespace amrkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace amrkit

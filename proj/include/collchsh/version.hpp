#pragma once

namespace collchsh {

inline constexpr const char* kVersion = "0.1.0";

}

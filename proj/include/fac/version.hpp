#pragma once

namespace fac {

inline constexpr const char* version_string = "1.0.0";

}

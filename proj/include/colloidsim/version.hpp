#pragma once

#include <string_view>

namespace colloidsim {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace colloidsim

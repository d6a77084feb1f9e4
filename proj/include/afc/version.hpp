// SPDX-License-Identifier: MIT
#pragma once

namespace afc {

inline constexpr const char* version_string = "0.1.0";

}  // namespace afc

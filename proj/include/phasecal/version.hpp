// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace phasecal {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kVersionString = "phasecal-0.1.0";

}  // namespace phasecal

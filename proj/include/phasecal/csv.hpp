// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace phasecal::csv {

// Round-trip-exact text form of a double; keeps re-runs byte identical.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string num(int v) { return std::to_string(v); }

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t c = 0; c < fields.size(); ++c) {
        if (c) out << ',';
        out << fields[c];
    }
    out << '\n';
}

}  // namespace phasecal::csv

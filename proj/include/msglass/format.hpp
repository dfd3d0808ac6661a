#pragma once

#include <cstdio>
#include <string>

namespace msglass {

/// 17 significant digits: round-trips IEEE doubles exactly.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_g(double x, int significant) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", significant, x);
    return buf;
}

} // namespace msglass

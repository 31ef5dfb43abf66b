#pragma once

// Text-formatting helpers shared by the canonical writers.

#include <cstdio>
#include <string>
#include <string_view>

#include "json.hpp"

namespace textspot::detail {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    // "-0.00" and friends print as zero.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string quote(std::string_view s) {
    return nlohmann::json(std::string(s)).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace textspot::detail

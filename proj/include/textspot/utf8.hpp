#pragma once

#include <string>
#include <string_view>

namespace textspot::utf8 {

/// Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);

}  // namespace textspot::utf8

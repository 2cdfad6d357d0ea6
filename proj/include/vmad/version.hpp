#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vmad {

inline constexpr std::string_view tool_name = "vmad";
inline constexpr std::string_view tool_version = "0.1.0";

// FNV-1a, used to fingerprint run configurations in output metadata.
inline std::uint64_t fnv1a_64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v);

} // namespace vmad

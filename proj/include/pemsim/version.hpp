#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pemsim {

inline constexpr const char* kToolVersion = "pemsim 0.1.0";

/// FNV-1a over raw bytes; stamps configs into run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

}  // namespace pemsim

#pragma once

// Little-endian binary64 packing shared by the container and checkpoint writers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace radar::detail {

inline void append_f64_le(std::string& out, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>(bits & 0xffu);
        bits >>= 8;
    }
    out.append(bytes, 8);
}

inline double read_f64_le(const char* p)
{
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
    return std::bit_cast<double>(bits);
}

} // namespace radar::detail

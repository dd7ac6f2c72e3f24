#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace snlv::wire {

// Little-endian, byte-wise IO so index files are identical across platforms.

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u16(std::ostream& os, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

inline void put_u8(std::ostream& os, std::uint8_t v) {
    os.write(reinterpret_cast<const char*>(&v), 1);
}

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("unexpected end of stream");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("unexpected end of stream");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline std::uint16_t get_u16(std::istream& is) {
    unsigned char b[2];
    if (!is.read(reinterpret_cast<char*>(b), 2)) throw std::runtime_error("unexpected end of stream");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint8_t get_u8(std::istream& is) {
    unsigned char b;
    if (!is.read(reinterpret_cast<char*>(&b), 1)) throw std::runtime_error("unexpected end of stream");
    return b;
}

inline void put_words(std::ostream& os, const std::vector<std::uint64_t>& w) {
    put_u64(os, w.size());
    for (std::uint64_t x : w) put_u64(os, x);
}

inline std::vector<std::uint64_t> get_words(std::istream& is) {
    std::uint64_t n = get_u64(is);
    std::vector<std::uint64_t> w(n);
    for (std::uint64_t i = 0; i < n; ++i) w[i] = get_u64(is);
    return w;
}

}  // namespace snlv::wire

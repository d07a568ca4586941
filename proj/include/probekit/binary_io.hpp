#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "probekit/common.hpp"

// Little-endian primitives shared by the EMB1 / TOK1 / MSK1 / PRB1 formats.

namespace probekit::binio {

namespace detail {

template <typename U>
U byteswap_if_big(U v) {
    if constexpr (std::endian::native == std::endian::big) {
        U out = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xFF));
        }
        return out;
    } else {
        return v;
    }
}

}  // namespace detail

template <typename U>
void write_uint(std::ostream& os, U value) {
    value = detail::byteswap_if_big(value);
    os.write(reinterpret_cast<const char*>(&value), sizeof(U));
}

template <typename U>
U read_uint(std::istream& is, std::string_view what) {
    U value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(U))) {
        throw ValidationError(std::string("unexpected end of file reading ") + std::string(what));
    }
    return detail::byteswap_if_big(value);
}

inline void write_f32(std::ostream& os, float v) { write_uint(os, std::bit_cast<std::uint32_t>(v)); }
inline void write_f64(std::ostream& os, double v) { write_uint(os, std::bit_cast<std::uint64_t>(v)); }

inline float read_f32(std::istream& is, std::string_view what) {
    return std::bit_cast<float>(read_uint<std::uint32_t>(is, what));
}
inline double read_f64(std::istream& is, std::string_view what) {
    return std::bit_cast<double>(read_uint<std::uint64_t>(is, what));
}

inline void write_magic(std::ostream& os, std::string_view magic) { os.write(magic.data(), 4); }

inline void expect_magic(std::istream& is, std::string_view magic, std::string_view path) {
    std::array<char, 4> buf{};
    if (!is.read(buf.data(), 4) || std::memcmp(buf.data(), magic.data(), 4) != 0) {
        throw ValidationError(std::string(path) + ": magic bytes mismatch, expected " + std::string(magic));
    }
}

/// True when the stream has no bytes left.
inline bool at_end(std::istream& is) {
    return is.peek() == std::char_traits<char>::eof();
}

}  // namespace probekit::binio

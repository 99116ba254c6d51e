#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsubset {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A vector/matrix dimension does not match its counterpart.
struct dimension_error : error {
    using error::error;
};

/// A precondition on an argument value is violated.
struct invalid_input : error {
    using error::error;
};

/// An enumeration size guard (2^d style) would be exceeded.
struct size_guard_error : error {
    using error::error;
};

namespace detail {

// 17 significant digits: enough for exact double round-trip in every
// machine-readable format this library emits.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

inline std::vector<std::uint8_t> string_to_bits(const std::string& s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw invalid_input("bitstring contains non-binary character");
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

inline int popcount(const std::vector<std::uint8_t>& bits) {
    int n = 0;
    for (auto b : bits) n += b ? 1 : 0;
    return n;
}

// Minimal JSON string escaping for the fixed schemas emitted here.
inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    return out;
}

}  // namespace detail
}  // namespace qsubset

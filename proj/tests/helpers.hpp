#pragma once

// Small conveniences shared by the test files: literal matrix construction,
// deterministic random problem instances, and tolerance helpers.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <qsubset/qsubset.hpp>

namespace helpers {

inline qsubset::Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t nr = rows.size();
    std::size_t nc = nr ? rows.begin()->size() : 0;
    qsubset::Matrix m(nr, nc);
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

// N(0,1) design with every column scaled to unit Euclidean norm.
inline qsubset::Matrix random_design(qsubset::Rng& rng, std::size_t n, std::size_t d) {
    qsubset::Matrix x(n, d);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < d; ++i) x(t, i) = rng.next_normal();
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) s += x(t, i) * x(t, i);
        s = std::sqrt(s);
        for (std::size_t t = 0; t < n; ++t) x(t, i) /= s;
    }
    return x;
}

inline std::vector<double> random_vector(qsubset::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& t : v) t = rng.next_normal();
    return v;
}

inline std::vector<std::uint8_t> mask_bits(std::uint32_t mask, std::size_t d) {
    std::vector<std::uint8_t> z(d, 0);
    for (std::size_t i = 0; i < d; ++i) z[i] = (mask >> i) & 1u;
    return z;
}

// |a - b| measured against the larger magnitude; exact matches pass outright.
inline bool close_rel(double a, double b, double tol) {
    if (a == b) return true;
    double scale = std::fmax(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= tol * scale;
}

inline bool close_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace helpers

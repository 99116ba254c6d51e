#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pbf.hpp"
#include "util.hpp"

namespace qsubset {

/// Product variable introduced by quadratization: aux == left * right.
struct AuxDef {
    int aux = 0;
    int left = 0;
    int right = 0;
};

/// Quadratic unconstrained binary model
///   offset + sum_i linear[i] x_i + sum_{i<j} quadratic[{i,j}] x_i x_j.
/// Variables [0, num_original) are the problem's own; the rest are aux.
struct QuboModel {
    int num_vars = 0;
    int num_original = 0;
    double offset = 0.0;
    std::vector<double> linear;
    std::map<std::pair<int, int>, double> quadratic;
    std::vector<AuxDef> aux_defs;
    double penalty_m = 1.0;
};

inline double qubo_value(const QuboModel& q, const std::vector<std::uint8_t>& bits) {
    if (bits.size() != static_cast<std::size_t>(q.num_vars))
        throw dimension_error("qubo_value: assignment length != num_vars");
    double v = q.offset;
    for (int i = 0; i < q.num_vars; ++i)
        if (bits[static_cast<std::size_t>(i)]) v += q.linear[static_cast<std::size_t>(i)];
    for (const auto& [key, c] : q.quadratic)
        if (bits[static_cast<std::size_t>(key.first)] && bits[static_cast<std::size_t>(key.second)])
            v += c;
    return v;
}

namespace detail {

inline std::pair<int, int> ordered_pair(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

inline bool key_contains(const std::vector<int>& key, int a, int b) {
    return std::binary_search(key.begin(), key.end(), a) &&
           std::binary_search(key.begin(), key.end(), b);
}

}  // namespace detail

/// Default quadratization penalty: strictly larger than the total coefficient
/// mass, so violating any product constraint can never pay off.
inline double default_penalty(const MultilinearPoly& poly) {
    double s = 0.0;
    for (const auto& [key, c] : poly.terms) s += std::abs(c);
    return 1.0 + 2.0 * s;
}

/// Reduces a degree <= 4 polynomial to quadratic by repeated product
/// substitution. Each round picks the variable pair appearing in the most
/// degree >= 3 terms (ties: lexicographically smallest pair), introduces an
/// aux variable for the product, rewrites every term of degree >= 2 that
/// contains the pair, and adds the penalty gadget
///   M * (x_i x_j - 2 x_i u - 2 x_j u + 3 u),
/// which is 0 when u == x_i x_j and >= M otherwise.
inline QuboModel quadratize(const MultilinearPoly& poly,
                            std::optional<double> penalty = std::nullopt) {
    if (penalty && *penalty <= 0.0)
        throw invalid_input("quadratize: penalty must be positive");
    double m = penalty ? *penalty : default_penalty(poly);
    MultilinearPoly work = poly;
    std::vector<AuxDef> aux_defs;

    for (;;) {
        std::map<std::pair<int, int>, int> pair_count;
        for (const auto& [key, c] : work.terms) {
            if (key.size() < 3) continue;
            for (std::size_t a = 0; a < key.size(); ++a)
                for (std::size_t b = a + 1; b < key.size(); ++b)
                    ++pair_count[{key[a], key[b]}];
        }
        if (pair_count.empty()) break;
        std::pair<int, int> best = pair_count.begin()->first;
        int best_n = pair_count.begin()->second;
        for (const auto& [pr, n] : pair_count)
            if (n > best_n) {
                best = pr;
                best_n = n;
            }
        int u = work.num_vars++;
        std::vector<std::pair<std::vector<int>, double>> rewritten;
        for (auto it = work.terms.begin(); it != work.terms.end();) {
            if (it->first.size() >= 2 && detail::key_contains(it->first, best.first, best.second)) {
                std::vector<int> key;
                key.reserve(it->first.size() - 1);
                for (int v : it->first)
                    if (v != best.first && v != best.second) key.push_back(v);
                key.push_back(u);
                rewritten.emplace_back(std::move(key), it->second);
                it = work.terms.erase(it);
            } else {
                ++it;
            }
        }
        for (auto& [key, c] : rewritten) work.add_term(std::move(key), c);
        work.add_term({best.first, best.second}, m);
        work.add_term({best.first, u}, -2.0 * m);
        work.add_term({best.second, u}, -2.0 * m);
        work.add_term({u}, 3.0 * m);
        aux_defs.push_back({u, best.first, best.second});
    }

    QuboModel q;
    q.num_vars = work.num_vars;
    q.num_original = poly.num_vars;
    q.offset = work.constant;
    q.linear.assign(static_cast<std::size_t>(work.num_vars), 0.0);
    q.aux_defs = std::move(aux_defs);
    q.penalty_m = m;
    for (const auto& [key, c] : work.terms) {
        if (key.size() == 1)
            q.linear[static_cast<std::size_t>(key[0])] = c;
        else
            q.quadratic[{key[0], key[1]}] = c;
    }
    return q;
}

/// Spin-glass form of a QUBO under x = (1 + s) / 2:
///   offset + sum h_i s_i + sum_{i<j} j[{i,j}] s_i s_j.
struct IsingModel {
    int num_spins = 0;
    double offset = 0.0;
    std::vector<double> h;
    std::map<std::pair<int, int>, double> j;
};

inline IsingModel to_ising(const QuboModel& q) {
    IsingModel m;
    m.num_spins = q.num_vars;
    m.offset = q.offset;
    m.h.assign(static_cast<std::size_t>(q.num_vars), 0.0);
    for (int i = 0; i < q.num_vars; ++i) {
        m.h[static_cast<std::size_t>(i)] = q.linear[static_cast<std::size_t>(i)] / 2.0;
        m.offset += q.linear[static_cast<std::size_t>(i)] / 2.0;
    }
    for (const auto& [key, c] : q.quadratic) {
        m.j[key] = c / 4.0;
        m.h[static_cast<std::size_t>(key.first)] += c / 4.0;
        m.h[static_cast<std::size_t>(key.second)] += c / 4.0;
        m.offset += c / 4.0;
    }
    return m;
}

inline double ising_value(const IsingModel& m, const std::vector<int>& spins) {
    if (spins.size() != static_cast<std::size_t>(m.num_spins))
        throw dimension_error("ising_value: spin vector length != num_spins");
    for (int s : spins)
        if (s != 1 && s != -1) throw invalid_input("ising_value: spins must be +1 or -1");
    double v = m.offset;
    for (int i = 0; i < m.num_spins; ++i) v += m.h[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(i)];
    for (const auto& [key, c] : m.j)
        v += c * spins[static_cast<std::size_t>(key.first)] * spins[static_cast<std::size_t>(key.second)];
    return v;
}

/// Text form:
///   p qubo <num_vars> <num_original>
///   offset <value>
///   <i> <i> <value>     (linear)
///   <i> <j> <value>     (quadratic, i < j)
///   # penalty_m <value>
///   # aux <u> = <i>*<j>
/// Values are printed with 17 significant digits, so emit/parse round-trips
/// reproduce the model and the byte stream exactly.
inline void write_qubo(std::ostream& out, const QuboModel& q) {
    out << "p qubo " << q.num_vars << ' ' << q.num_original << '\n';
    out << "offset " << detail::format_real(q.offset) << '\n';
    for (int i = 0; i < q.num_vars; ++i) {
        double c = q.linear[static_cast<std::size_t>(i)];
        if (c == 0.0) continue;
        out << i << ' ' << i << ' ' << detail::format_real(c) << '\n';
    }
    for (const auto& [key, c] : q.quadratic)
        out << key.first << ' ' << key.second << ' ' << detail::format_real(c) << '\n';
    out << "# penalty_m " << detail::format_real(q.penalty_m) << '\n';
    for (const auto& a : q.aux_defs)
        out << "# aux " << a.aux << " = " << a.left << "*" << a.right << '\n';
}

inline std::string qubo_to_string(const QuboModel& q) {
    std::ostringstream out;
    write_qubo(out, q);
    return out.str();
}

inline QuboModel read_qubo(std::istream& in) {
    QuboModel q;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (!have_header) {
            if (line[0] == '#') continue;  // leading comments carry no model data
            std::string p, kind;
            ls >> p >> kind >> q.num_vars >> q.num_original;
            if (ls.fail() || p != "p" || kind != "qubo" || q.num_vars < 0 ||
                q.num_original < 0 || q.num_original > q.num_vars)
                throw invalid_input("qubo text: bad header at line " + std::to_string(line_no));
            q.linear.assign(static_cast<std::size_t>(q.num_vars), 0.0);
            have_header = true;
            continue;
        }
        if (line[0] == '#') {
            std::string hash, word;
            ls >> hash >> word;
            if (word == "penalty_m") {
                if (!(ls >> q.penalty_m))
                    throw invalid_input("qubo text: bad penalty_m at line " + std::to_string(line_no));
            } else if (word == "aux") {
                AuxDef a;
                char eq = 0, star = 0;
                if (!(ls >> a.aux >> eq >> a.left) || eq != '=' || !(ls >> star) || star != '*' ||
                    !(ls >> a.right) || a.aux < 0 || a.aux >= q.num_vars || a.left < 0 ||
                    a.left >= q.num_vars || a.right < 0 || a.right >= q.num_vars)
                    throw invalid_input("qubo text: bad aux line at line " + std::to_string(line_no));
                q.aux_defs.push_back(a);
            }
            continue;  // other comments are ignored
        }
        if (line.rfind("offset", 0) == 0) {
            std::string word;
            ls >> word;
            if (!(ls >> q.offset))
                throw invalid_input("qubo text: bad offset at line " + std::to_string(line_no));
            continue;
        }
        int i = 0, j = 0;
        double c = 0.0;
        if (!(ls >> i >> j >> c) || i < 0 || j < 0 || i >= q.num_vars || j >= q.num_vars)
            throw invalid_input("qubo text: bad coefficient line at line " + std::to_string(line_no));
        if (i == j)
            q.linear[static_cast<std::size_t>(i)] += c;
        else
            q.quadratic[detail::ordered_pair(i, j)] += c;
    }
    if (!have_header) throw invalid_input("qubo text: missing header");
    return q;
}

inline QuboModel qubo_from_string(const std::string& text) {
    std::istringstream in(text);
    return read_qubo(in);
}

}  // namespace qsubset

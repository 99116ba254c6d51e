#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linalg.hpp"
#include "util.hpp"

namespace qsubset {

/// Pseudo-Boolean polynomial in multilinear form over binary variables.
///
/// Keys are sorted tuples of distinct variable indices, degree 1 to 4;
/// the degree-0 part lives in `constant`. Coefficients with magnitude
/// <= 1e-15 are dropped on insertion.
struct MultilinearPoly {
    int num_vars = 0;
    double constant = 0.0;
    std::map<std::vector<int>, double> terms;

    void add_term(std::vector<int> indices, double coeff) {
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
        if (indices.empty()) {
            constant += coeff;
            return;
        }
        if (indices.size() > 4)
            throw invalid_input("term degree exceeds 4");
        if (indices.front() < 0 || indices.back() >= num_vars)
            throw invalid_input("term index out of range");
        auto it = terms.find(indices);
        double c = (it == terms.end() ? 0.0 : it->second) + coeff;
        if (std::abs(c) <= 1e-15) {
            if (it != terms.end()) terms.erase(it);
        } else if (it == terms.end()) {
            terms.emplace(std::move(indices), c);
        } else {
            it->second = c;
        }
    }

    int degree() const {
        std::size_t deg = 0;
        for (const auto& [k, c] : terms) deg = std::max(deg, k.size());
        return static_cast<int>(deg);
    }
};

inline double evaluate(const MultilinearPoly& poly, const std::vector<std::uint8_t>& bits) {
    if (bits.size() != static_cast<std::size_t>(poly.num_vars))
        throw dimension_error("evaluate: assignment length != num_vars");
    double v = poly.constant;
    for (const auto& [key, coeff] : poly.terms) {
        bool on = true;
        for (int i : key)
            if (!bits[static_cast<std::size_t>(i)]) {
                on = false;
                break;
            }
        if (on) v += coeff;
    }
    return v;
}

/// Closed-form refit weights under the first-order approximate inverse:
///   w_i = z_i * (alpha*(2-alpha)*q_i - alpha^2 * sum_{j != i} z_j p_ij q_j).
inline std::vector<double> approx_weights(const GramSummary& g,
                                          const std::vector<std::uint8_t>& z) {
    std::size_t d = g.q.size();
    if (z.size() != d) throw dimension_error("approx_weights: selection length != d");
    double a = g.alpha;
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        if (!z[i]) continue;
        double s = a * (2.0 - a) * g.q[i];
        for (std::size_t j = 0; j < d; ++j) {
            if (j == i || !z[j]) continue;
            s -= a * a * g.p(i, j) * g.q[j];
        }
        w[i] = s;
    }
    return w;
}

/// Compiles the l0-penalized least-squares objective, with the refit weights
/// replaced by their first-order closed form, into a quartic polynomial over
/// the selection bits:
///
///   sum_t (y_t - sum_i w_i(z) x_ti z_i)^2 + lambda * sum_i z_i.
///
/// Minimizing the result over z in {0,1}^d approximates best-subset search.
inline MultilinearPoly compile_objective(const GramSummary& g, const Matrix& x,
                                         const std::vector<double>& y, double lambda) {
    std::size_t n = x.rows(), d = x.cols();
    if (y.size() != n) throw dimension_error("compile_objective: row count != target length");
    if (g.q.size() != d) throw dimension_error("compile_objective: gram dimension != columns");
    if (lambda < 0.0) throw invalid_input("compile_objective: lambda must be non-negative");
    double a = g.alpha;

    std::vector<double> qp(d);  // first-order linear response per variable
    for (std::size_t i = 0; i < d; ++i) qp[i] = a * (2.0 - a) * g.q[i];

    std::size_t n2 = d * (d - 1) / 2;
    std::size_t n3 = d >= 3 ? n2 * (d - 2) / 3 : 0;
    std::size_t n4 = d >= 4 ? n3 * (d - 3) / 4 : 0;
    std::vector<double> e(d, 0.0), f(n2, 0.0), gg(n3, 0.0), h(n4, 0.0);
    double constant = 0.0;

    std::vector<double> u(d), b(d * d);
    for (std::size_t t = 0; t < n; ++t) {
        double yt = y[t];
        constant += yt * yt;
        for (std::size_t i = 0; i < d; ++i) u[i] = qp[i] * x(t, i);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                b[i * d + j] = a * a * g.p(i, j) * (g.q[j] * x(t, i) + g.q[i] * x(t, j));

        for (std::size_t i = 0; i < d; ++i) e[i] += u[i] * u[i] - 2.0 * u[i] * yt;
        std::size_t c2 = 0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) {
                double bij = b[i * d + j];
                f[c2++] += bij * bij + 2.0 * (u[i] * u[j] - (u[i] + u[j] - yt) * bij);
            }
        std::size_t c3 = 0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                for (std::size_t k = j + 1; k < d; ++k) {
                    double bij = b[i * d + j], bik = b[i * d + k], bjk = b[j * d + k];
                    gg[c3++] += 2.0 * (bij * bik + bij * bjk + bik * bjk - u[k] * bij -
                                       u[i] * bjk - u[j] * bik);
                }
        std::size_t c4 = 0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                for (std::size_t k = j + 1; k < d; ++k)
                    for (std::size_t l = k + 1; l < d; ++l)
                        h[c4++] += 2.0 * (b[i * d + j] * b[k * d + l] +
                                          b[i * d + k] * b[j * d + l] +
                                          b[i * d + l] * b[j * d + k]);
    }

    MultilinearPoly poly;
    poly.num_vars = static_cast<int>(d);
    poly.constant = constant;
    for (std::size_t i = 0; i < d; ++i)
        poly.add_term({static_cast<int>(i)}, e[i] + lambda);
    std::size_t c2 = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            poly.add_term({static_cast<int>(i), static_cast<int>(j)}, f[c2++]);
    std::size_t c3 = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            for (std::size_t k = j + 1; k < d; ++k)
                poly.add_term({static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)},
                              gg[c3++]);
    std::size_t c4 = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            for (std::size_t k = j + 1; k < d; ++k)
                for (std::size_t l = k + 1; l < d; ++l)
                    poly.add_term({static_cast<int>(i), static_cast<int>(j),
                                   static_cast<int>(k), static_cast<int>(l)},
                                  h[c4++]);
    return poly;
}

/// Serializes as {"num_vars", "constant", "terms": [[[indices], coeff], ...]}
/// with terms ordered by degree, then lexicographically.
inline std::string poly_to_json(const MultilinearPoly& poly) {
    std::vector<const std::pair<const std::vector<int>, double>*> order;
    order.reserve(poly.terms.size());
    for (const auto& kv : poly.terms) order.push_back(&kv);
    std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        if (a->first.size() != b->first.size()) return a->first.size() < b->first.size();
        return a->first < b->first;
    });
    std::ostringstream out;
    out << "{\n  \"num_vars\": " << poly.num_vars << ",\n  \"constant\": "
        << detail::format_real(poly.constant) << ",\n  \"terms\": [";
    bool first = true;
    for (const auto* kv : order) {
        out << (first ? "\n" : ",\n") << "    [[";
        for (std::size_t i = 0; i < kv->first.size(); ++i)
            out << (i ? ", " : "") << kv->first[i];
        out << "], " << detail::format_real(kv->second) << "]";
        first = false;
    }
    out << (poly.terms.empty() ? "]\n}\n" : "\n  ]\n}\n");
    return out.str();
}

inline MultilinearPoly poly_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input(std::string("polynomial JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("num_vars") || !j.contains("constant") ||
        !j.contains("terms") || !j["terms"].is_array())
        throw invalid_input("polynomial JSON: expected num_vars, constant, terms");
    MultilinearPoly poly;
    poly.num_vars = j["num_vars"].get<int>();
    if (poly.num_vars < 0) throw invalid_input("polynomial JSON: num_vars must be >= 0");
    poly.constant = j["constant"].get<double>();
    for (const auto& entry : j["terms"]) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array())
            throw invalid_input("polynomial JSON: each term must be [[indices], coeff]");
        std::vector<int> key;
        for (const auto& idx : entry[0]) key.push_back(idx.get<int>());
        if (key.empty()) throw invalid_input("polynomial JSON: empty index tuple");
        poly.add_term(std::move(key), entry[1].get<double>());
    }
    return poly;
}

}  // namespace qsubset

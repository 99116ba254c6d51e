#pragma once

// Reference implementations used to cross-check library results. Everything
// here favors obviousness over speed: textbook formulas, dense loops, and no
// shared code with the routines under test beyond the Matrix container.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <qsubset/qsubset.hpp>

namespace oracles {

// Polynomial value straight from the term list, one product per term.
inline double poly_value(const qsubset::MultilinearPoly& poly,
                         const std::vector<std::uint8_t>& bits) {
    double v = poly.constant;
    for (const auto& [key, coeff] : poly.terms) {
        double prod = coeff;
        for (int idx : key) prod *= bits[static_cast<std::size_t>(idx)];
        v += prod;
    }
    return v;
}

// First-order truncated-series weights for mask z, assembled through dense
// matrix products on the masked Gram system: w = alpha*(2I - alpha*Pz)*qz
// with Pz = Dz P Dz and qz = Dz q. Independent of the closed-form route.
inline std::vector<double> masked_series_weights(const qsubset::Matrix& p,
                                                 const std::vector<double>& q,
                                                 double alpha,
                                                 const std::vector<std::uint8_t>& z) {
    std::size_t d = q.size();
    qsubset::Matrix pz(d, d);
    std::vector<double> qz(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        qz[i] = z[i] ? q[i] : 0.0;
        for (std::size_t j = 0; j < d; ++j) pz(i, j) = (z[i] && z[j]) ? p(i, j) : 0.0;
    }
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += pz(i, j) * qz[j];
        w[i] = alpha * (2.0 * qz[i] - alpha * row);
    }
    return w;
}

// Residual sum of squares at weights w, plus lambda per selected feature.
inline double penalized_sse(const qsubset::Matrix& x, const std::vector<double>& y,
                            const std::vector<double>& w,
                            const std::vector<std::uint8_t>& z, double lambda) {
    double sse = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) {
        double pred = 0.0;
        for (std::size_t i = 0; i < x.cols(); ++i) pred += x(t, i) * w[i];
        double r = y[t] - pred;
        sse += r * r;
    }
    int card = 0;
    for (auto b : z) card += b ? 1 : 0;
    return sse + lambda * card;
}

// The selection objective at first-order series weights, matrix route end
// to end. This is what the compiled polynomial must reproduce at every z.
inline double masked_objective(const qsubset::Matrix& x, const std::vector<double>& y,
                               const qsubset::Matrix& p, const std::vector<double>& q,
                               double alpha, double lambda,
                               const std::vector<std::uint8_t>& z) {
    return penalized_sse(x, y, masked_series_weights(p, q, alpha, z), z, lambda);
}

// Gauss-Jordan inverse with partial pivoting.
inline qsubset::Matrix invert(qsubset::Matrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("invert: matrix not square");
    std::size_t n = a.rows();
    qsubset::Matrix inv = qsubset::Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0) throw std::invalid_argument("invert: singular matrix");
        if (pivot != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(pivot, c), a(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        double scale = 1.0 / a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) *= scale;
            inv(col, c) *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double factor = a(r, col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= factor * a(col, c);
                inv(r, c) -= factor * inv(col, c);
            }
        }
    }
    return inv;
}

// Largest singular value by power iteration on AᵀA. The squared iteration
// also handles symmetric matrices with a +/- eigenvalue pair of equal size.
inline double spectral_norm(const qsubset::Matrix& a) {
    std::size_t n = a.cols();
    if (n == 0 || a.rows() == 0) return 0.0;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1.0 / static_cast<double>(i + 2);
    double lambda = 0.0;
    for (int iter = 0; iter < 400; ++iter) {
        std::vector<double> av(a.rows(), 0.0);
        for (std::size_t r = 0; r < a.rows(); ++r)
            for (std::size_t c = 0; c < n; ++c) av[r] += a(r, c) * v[c];
        std::vector<double> atav(n, 0.0);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t r = 0; r < a.rows(); ++r) atav[c] += a(r, c) * av[r];
        double norm = 0.0;
        for (double t : atav) norm += t * t;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = norm;
        for (std::size_t c = 0; c < n; ++c) v[c] = atav[c] / norm;
    }
    return std::sqrt(lambda);
}

// Least squares on the selected columns via the normal equations, solved by
// Gaussian elimination. Requires the selected block to be nonsingular, which
// holds for the generic random designs these tests feed it.
inline std::vector<double> refit_normal_equations(const qsubset::Matrix& x,
                                                  const std::vector<double>& y,
                                                  const std::vector<std::uint8_t>& z) {
    std::size_t d = x.cols();
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < d; ++i)
        if (z[i]) cols.push_back(i);
    std::vector<double> w(d, 0.0);
    std::size_t k = cols.size();
    if (k == 0) return w;
    qsubset::Matrix g(k, k);
    std::vector<double> b(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t t = 0; t < x.rows(); ++t) s += x(t, cols[a]) * x(t, cols[c]);
            g(a, c) = s;
        }
        double s = 0.0;
        for (std::size_t t = 0; t < x.rows(); ++t) s += x(t, cols[a]) * y[t];
        b[a] = s;
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(g(r, col)) > std::fabs(g(pivot, col))) pivot = r;
        if (g(pivot, col) == 0.0)
            throw std::invalid_argument("refit_normal_equations: singular normal matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(g(pivot, c), g(col, c));
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            double factor = g(r, col) / g(col, col);
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) g(r, c) -= factor * g(col, c);
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t ri = k; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < k; ++c) s -= g(ri, c) * w[cols[c]];
        w[cols[ri]] = s / g(ri, ri);
    }
    return w;
}

// Exhaustive subset search visiting masks in Gray-code order, scoring
// through the normal-equations refit. Ties resolve exactly like the library
// claims: lower objective, then fewer features, then lexicographically
// smaller mask. A different visit order plus a different scorer makes this
// a genuinely independent check.
inline qsubset::SubsetFit subset_search_gray(const qsubset::Matrix& x,
                                             const std::vector<double>& y,
                                             double lambda) {
    std::size_t d = x.cols();
    qsubset::SubsetFit best;
    bool have = false;
    for (std::uint32_t k = 0; k < (1u << d); ++k) {
        std::uint32_t mask = k ^ (k >> 1);
        std::vector<std::uint8_t> z(d, 0);
        for (std::size_t i = 0; i < d; ++i) z[i] = (mask >> i) & 1u;
        std::vector<double> w = refit_normal_equations(x, y, z);
        qsubset::SubsetFit fit;
        fit.z = z;
        fit.w = w;
        fit.sse = 0.0;
        for (std::size_t t = 0; t < x.rows(); ++t) {
            double pred = 0.0;
            for (std::size_t i = 0; i < d; ++i) pred += x(t, i) * w[i];
            double r = y[t] - pred;
            fit.sse += r * r;
        }
        fit.cardinality = 0;
        for (auto b : z) fit.cardinality += b ? 1 : 0;
        fit.objective = fit.sse + lambda * fit.cardinality;
        bool take = !have;
        if (have) {
            if (fit.objective < best.objective) take = true;
            else if (fit.objective == best.objective) {
                if (fit.cardinality < best.cardinality) take = true;
                else if (fit.cardinality == best.cardinality &&
                         std::lexicographical_compare(fit.z.begin(), fit.z.end(),
                                                      best.z.begin(), best.z.end()))
                    take = true;
            }
        }
        if (take) {
            best = fit;
            have = true;
        }
    }
    return best;
}

// Minimum QUBO energy by scanning assignments from the highest mask down.
struct QuboMin {
    std::vector<std::uint8_t> assignment;
    double energy = 0.0;
};

inline QuboMin qubo_min_descending(const qsubset::QuboModel& q) {
    std::size_t n = static_cast<std::size_t>(q.num_vars);
    QuboMin best;
    bool have = false;
    for (std::uint32_t mask = (1u << n); mask-- > 0;) {
        std::vector<std::uint8_t> bits(n, 0);
        for (std::size_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1u;
        double e = qsubset::qubo_value(q, bits);
        if (!have || e <= best.energy) {
            best.assignment = bits;
            best.energy = e;
            have = true;
        }
    }
    return best;
}

}  // namespace oracles

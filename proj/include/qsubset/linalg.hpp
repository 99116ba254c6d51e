#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "util.hpp"

namespace qsubset {

/// Dense row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw dimension_error("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw dimension_error("matvec: dimensions differ");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// Gram data of a regression problem: p = XᵀX, q = Xᵀy, and the series
/// parameter alpha used by the approximate-inverse expansion.
struct GramSummary {
    Matrix p;               // d x d
    std::vector<double> q;  // d
    double alpha = 0.0;
};

inline double default_alpha(std::size_t d) { return 2.0 / (static_cast<double>(d) + 1.0); }

inline GramSummary gram_summary(const Matrix& x, const std::vector<double>& y, double alpha) {
    if (x.rows() != y.size()) throw dimension_error("gram_summary: row count != target length");
    if (x.cols() == 0) throw invalid_input("gram_summary: matrix has no columns");
    std::size_t d = x.cols();
    if (!(alpha > 0.0) || alpha > default_alpha(d))
        throw invalid_input("gram_summary: alpha must lie in (0, 2/(d+1)]");
    GramSummary g;
    g.alpha = alpha;
    g.p = Matrix(d, d);
    g.q.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < x.rows(); ++t) s += x(t, i) * x(t, j);
            g.p(i, j) = s;
            g.p(j, i) = s;
        }
        double s = 0.0;
        for (std::size_t t = 0; t < x.rows(); ++t) s += x(t, i) * y[t];
        g.q[i] = s;
    }
    return g;
}

inline GramSummary gram_summary(const Matrix& x, const std::vector<double>& y) {
    return gram_summary(x, y, default_alpha(x.cols()));
}

/// Truncated geometric-series approximation of inv(P):
///   alpha * sum_{i=0}^{order} (I - alpha*P)^i,
/// evaluated by Horner's scheme. order = 1 gives alpha*(2I - alpha*P).
inline Matrix neumann_inverse_approx(const Matrix& p, double alpha, int order = 1) {
    if (p.rows() != p.cols()) throw dimension_error("neumann_inverse_approx: matrix not square");
    if (order < 0) throw invalid_input("neumann_inverse_approx: order must be >= 0");
    if (!(alpha > 0.0)) throw invalid_input("neumann_inverse_approx: alpha must be positive");
    std::size_t n = p.rows();
    Matrix b = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) -= alpha * p(i, j);
    Matrix s = Matrix::identity(n);
    for (int k = 0; k < order; ++k) {
        s = matmul(b, s);
        for (std::size_t i = 0; i < n; ++i) s(i, i) += 1.0;
    }
    for (auto& v : s.data()) v *= alpha;
    return s;
}

/// Eigendecomposition of a symmetric matrix.
struct EigenResult {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi rotations; adequate for the small symmetric matrices
/// (Gram matrices of d <= a few dozen) this library works with.
inline EigenResult jacobi_eigen(const Matrix& s_in) {
    if (s_in.rows() != s_in.cols()) throw dimension_error("jacobi_eigen: matrix not square");
    std::size_t n = s_in.rows();
    Matrix a = s_in;
    Matrix v = Matrix::identity(n);
    if (n > 1) {
        double norm = 0.0;
        for (auto x : a.data()) norm += x * x;
        norm = std::sqrt(norm);
        double thresh = (norm > 0.0 ? norm : 1.0) * 1e-15;
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
            if (std::sqrt(off) <= thresh) break;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    double apq = a(p, q);
                    if (std::abs(apq) <= thresh / static_cast<double>(n * n)) continue;
                    double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                    double t = (theta >= 0.0 ? 1.0 : -1.0) /
                               (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    double c = 1.0 / std::sqrt(1.0 + t * t);
                    double s = t * c;
                    for (std::size_t k = 0; k < n; ++k) {
                        double akp = a(k, p), akq = a(k, q);
                        a(k, p) = c * akp - s * akq;
                        a(k, q) = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        double apk = a(p, k), aqk = a(q, k);
                        a(p, k) = c * apk - s * aqk;
                        a(q, k) = s * apk + c * aqk;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        double vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    EigenResult r;
    r.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.values[i] = a(i, i);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return r.values[i] < r.values[j]; });
    EigenResult sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted.values[j] = r.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
    }
    return sorted;
}

/// Spectral bounds check for the Gram matrix of a column-normalized design:
/// all eigenvalues must lie in [0, d].
struct EigenRange {
    double min_value = 0.0;
    double max_value = 0.0;
    bool within_bounds = false;
};

inline EigenRange eigen_range_check(const Matrix& gram) {
    if (gram.rows() != gram.cols()) throw dimension_error("eigen_range_check: matrix not square");
    auto eig = jacobi_eigen(gram);
    EigenRange r;
    r.min_value = eig.values.front();
    r.max_value = eig.values.back();
    double d = static_cast<double>(gram.rows());
    double tol = 1e-9 * std::max(1.0, d);
    r.within_bounds = r.min_value >= -tol && r.max_value <= d + tol;
    return r;
}

/// Minimum-norm least squares min_w ||X w - y||_2 via one-sided Jacobi SVD
/// on X itself. Singular values <= 1e-10 * sigma_max count as zero, so
/// duplicated columns share weight equally instead of blowing up.
inline std::vector<double> least_squares(const Matrix& x, const std::vector<double>& y) {
    if (x.rows() != y.size()) throw dimension_error("least_squares: row count != target length");
    std::size_t n = x.rows(), m = x.cols();
    if (m == 0) return {};
    Matrix a = x;                       // becomes U * diag(sigma)
    Matrix v = Matrix::identity(m);     // accumulates right singular vectors
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                double zeta = (aqq - app) / (2.0 * apq);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sigma(m, 0.0);
    double sigma_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
        sigma[j] = std::sqrt(s);
        sigma_max = std::max(sigma_max, sigma[j]);
    }
    std::vector<double> w(m, 0.0);
    if (sigma_max == 0.0) return w;
    double cutoff = 1e-10 * sigma_max;
    for (std::size_t j = 0; j < m; ++j) {
        if (sigma[j] <= cutoff) continue;
        double uty = 0.0;  // (u_j . y) where u_j = a_col_j / sigma_j
        for (std::size_t i = 0; i < n; ++i) uty += a(i, j) * y[i];
        double coef = uty / (sigma[j] * sigma[j]);
        for (std::size_t i = 0; i < m; ++i) w[i] += v(i, j) * coef;
    }
    return w;
}

}  // namespace qsubset

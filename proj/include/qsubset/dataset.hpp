#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace qsubset {

struct csv_parse_error : invalid_input {
    using invalid_input::invalid_input;
};
struct csv_value_error : invalid_input {
    using invalid_input::invalid_input;
};
struct missing_target_error : invalid_input {
    using invalid_input::invalid_input;
};
struct zero_column_error : invalid_input {
    using invalid_input::invalid_input;
};
struct split_error : invalid_input {
    using invalid_input::invalid_input;
};
struct synthetic_spec_error : invalid_input {
    using invalid_input::invalid_input;
};

/// Regression data with unit-norm feature columns.
///
/// Invariants: every column of x has l2 norm within 1e-12 of 1; y is kept in
/// original units; no intercept column. column_norms / column_means record
/// the transform applied to the raw features so held-out rows can be mapped
/// into the same coordinates.
struct Dataset {
    Matrix x;
    std::vector<double> y;
    std::vector<std::string> feature_names;
    std::vector<double> column_norms;
    std::vector<double> column_means;
    bool centered = false;
};

/// Feature rows mapped by a training set's transform; columns are generally
/// not unit-norm.
struct TestSet {
    Matrix x;
    std::vector<double> y;
};

namespace detail {

// Scales each column to unit l2 norm, recording the divisor. A column whose
// norm is already within 1e-12 of 1 is left untouched so that a normalized
// dataset round-trips through CSV bit-for-bit.
inline std::vector<double> normalize_columns(Matrix& x) {
    std::vector<double> norms(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, j) * x(i, j);
        double norm = std::sqrt(s);
        if (norm == 0.0) throw zero_column_error("column " + std::to_string(j) + " is all zero");
        norms[j] = norm;
        if (std::abs(norm - 1.0) <= 1e-12) continue;
        for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) /= norm;
    }
    return norms;
}

inline std::vector<double> center_columns(Matrix& x) {
    std::vector<double> means(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, j);
        means[j] = s / static_cast<double>(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) -= means[j];
    }
    return means;
}

inline double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
        throw csv_value_error("line " + std::to_string(line_no) + ", column " +
                              std::to_string(col_no + 1) + ": not a number: '" + cell + "'");
    if (!std::isfinite(v))
        throw csv_value_error("line " + std::to_string(line_no) + ", column " +
                              std::to_string(col_no + 1) + ": non-finite value");
    return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace detail

/// Raw numeric table read from CSV: header names plus a value matrix.
struct RawTable {
    std::vector<std::string> names;
    Matrix values;
};

inline RawTable read_csv(std::istream& in, const std::string& origin = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw csv_parse_error(origin + ": empty file");
    RawTable table;
    table.names = detail::split_line(line);
    if (table.names.size() < 2)
        throw csv_parse_error(origin + ": need at least one feature column and a target column");
    std::vector<double> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = detail::split_line(line);
        if (cells.size() != table.names.size())
            throw csv_parse_error(origin + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(table.names.size()));
        for (std::size_t j = 0; j < cells.size(); ++j)
            rows.push_back(detail::parse_cell(cells[j], line_no, j));
    }
    std::size_t n = rows.size() / table.names.size();
    if (n == 0) throw csv_parse_error(origin + ": no data rows");
    table.values = Matrix(n, table.names.size());
    table.values.data() = std::move(rows);
    return table;
}

inline RawTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open file: " + path);
    return read_csv(in, path);
}

/// Builds a Dataset from a raw table. target selects the target column by
/// name; empty means the last column. center subtracts feature column means
/// before normalization.
inline Dataset from_table(const RawTable& table, const std::string& target = "",
                          bool center = false) {
    std::size_t target_col = table.names.size() - 1;
    if (!target.empty()) {
        auto it = std::find(table.names.begin(), table.names.end(), target);
        if (it == table.names.end())
            throw missing_target_error("no column named '" + target + "'");
        target_col = static_cast<std::size_t>(it - table.names.begin());
    }
    if (table.names.size() < 2)
        throw csv_parse_error("need at least one feature column besides the target");
    Dataset ds;
    ds.centered = center;
    std::size_t n = table.values.rows();
    std::size_t d = table.names.size() - 1;
    ds.x = Matrix(n, d);
    ds.y.resize(n);
    std::size_t out = 0;
    for (std::size_t j = 0; j < table.names.size(); ++j) {
        if (j == target_col) continue;
        ds.feature_names.push_back(table.names[j]);
        for (std::size_t i = 0; i < n; ++i) ds.x(i, out) = table.values(i, j);
        ++out;
    }
    for (std::size_t i = 0; i < n; ++i) ds.y[i] = table.values(i, target_col);
    ds.column_means = center ? detail::center_columns(ds.x) : std::vector<double>(d, 0.0);
    ds.column_norms = detail::normalize_columns(ds.x);
    return ds;
}

inline Dataset load_csv(const std::string& path, const std::string& target = "",
                        bool center = false) {
    return from_table(read_csv_file(path), target, center);
}

/// Maps raw feature rows into a training set's coordinates (its means and
/// norms) and pairs them with the raw targets.
inline TestSet apply_transform(const Dataset& train, const RawTable& raw,
                               const std::string& target = "") {
    Dataset plain = from_table(raw, target, false);  // validates shape and finiteness
    std::size_t d = train.x.cols();
    if (raw.names.size() - 1 != d)
        throw dimension_error("held-out data has " + std::to_string(raw.names.size() - 1) +
                              " features, training set has " + std::to_string(d));
    std::size_t target_col = raw.names.size() - 1;
    if (!target.empty()) {
        auto it = std::find(raw.names.begin(), raw.names.end(), target);
        if (it == raw.names.end()) throw missing_target_error("no column named '" + target + "'");
        target_col = static_cast<std::size_t>(it - raw.names.begin());
    }
    std::size_t n = raw.values.rows();
    TestSet ts;
    ts.x = Matrix(n, d);
    ts.y.resize(n);
    std::size_t out = 0;
    for (std::size_t j = 0; j < raw.names.size(); ++j) {
        if (j == target_col) continue;
        for (std::size_t i = 0; i < n; ++i)
            ts.x(i, out) = (raw.values(i, j) - train.column_means[out]) / train.column_norms[out];
        ++out;
    }
    for (std::size_t i = 0; i < n; ++i) ts.y[i] = raw.values(i, target_col);
    return ts;
}

inline void write_csv(std::ostream& out, const Matrix& x, const std::vector<double>& y,
                      const std::vector<std::string>& feature_names,
                      const std::string& target_name = "y") {
    if (x.rows() != y.size()) throw dimension_error("write_csv: row count != target length");
    if (x.cols() != feature_names.size())
        throw dimension_error("write_csv: column count != name count");
    for (std::size_t j = 0; j < feature_names.size(); ++j) out << feature_names[j] << ',';
    out << target_name << '\n';
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) out << detail::format_real(x(i, j)) << ',';
        out << detail::format_real(y[i]) << '\n';
    }
}

inline void write_csv_file(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot open file for writing: " + path);
    write_csv(out, ds.x, ds.y, ds.feature_names);
}

enum class XDistribution { uniform, normal };

/// Recipe for a noiseless sparse linear dataset.
struct SyntheticSpec {
    std::size_t n = 300;
    std::size_t d = 0;
    std::size_t k_true = 0;
    std::uint64_t seed = 1;
    XDistribution x_distribution = XDistribution::uniform;
    double w_min = 0.5;
    double w_max = 2.0;
};

struct SyntheticResult {
    Dataset dataset;
    std::vector<double> true_weights;     // length d, zeros off support
    std::vector<std::size_t> support;     // ascending indices of nonzeros
};

namespace detail {

inline void check_spec(const SyntheticSpec& spec) {
    if (spec.d == 0) throw synthetic_spec_error("d must be positive");
    if (spec.n == 0) throw synthetic_spec_error("n must be positive");
    if (spec.k_true > spec.d) throw synthetic_spec_error("k_true cannot exceed d");
    if (!(spec.w_min > 0.0)) throw synthetic_spec_error("w_min must be positive");
    if (spec.w_max < spec.w_min) throw synthetic_spec_error("w_max must be >= w_min");
}

inline Matrix draw_design(const SyntheticSpec& spec, Rng& rng) {
    Matrix x(spec.n, spec.d);
    for (std::size_t t = 0; t < spec.n; ++t)
        for (std::size_t i = 0; i < spec.d; ++i)
            x(t, i) = spec.x_distribution == XDistribution::uniform
                          ? rng.next_uniform(-1.0, 1.0)
                          : rng.next_normal();
    return x;
}

inline std::vector<std::size_t> draw_support(const SyntheticSpec& spec, Rng& rng) {
    std::vector<std::size_t> pool(spec.d);
    for (std::size_t i = 0; i < spec.d; ++i) pool[i] = i;
    for (std::size_t j = 0; j < spec.k_true; ++j) {
        std::size_t k = j + static_cast<std::size_t>(rng.next_below(spec.d - j));
        std::swap(pool[j], pool[k]);
    }
    std::vector<std::size_t> support(pool.begin(), pool.begin() + spec.k_true);
    std::sort(support.begin(), support.end());
    return support;
}

inline std::vector<double> draw_weights(const SyntheticSpec& spec,
                                        const std::vector<std::size_t>& support, Rng& rng) {
    std::vector<double> w(spec.d, 0.0);
    for (auto i : support) {
        double magnitude = rng.next_uniform(spec.w_min, spec.w_max);
        double sign = rng.next_unit() < 0.5 ? 1.0 : -1.0;
        w[i] = sign * magnitude;
    }
    return w;
}

}  // namespace detail

/// Draws a design matrix, a sparse weight vector, and a noiseless target
/// y = X_normalized * w. Deterministic in spec.seed: the design is drawn
/// row-major first, then the support, then magnitude/sign per support index
/// in ascending index order.
inline SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
    detail::check_spec(spec);
    Rng rng(avalanche_mix(spec.seed, 0));
    SyntheticResult res;
    res.dataset.x = detail::draw_design(spec, rng);
    res.support = detail::draw_support(spec, rng);
    res.true_weights = detail::draw_weights(spec, res.support, rng);
    res.dataset.column_means.assign(spec.d, 0.0);
    res.dataset.column_norms = detail::normalize_columns(res.dataset.x);
    res.dataset.y = matvec(res.dataset.x, res.true_weights);
    res.dataset.feature_names.resize(spec.d);
    for (std::size_t i = 0; i < spec.d; ++i)
        res.dataset.feature_names[i] = "x" + std::to_string(i);
    return res;
}

/// Fresh rows from the same model: a new design drawn with the given seed,
/// mapped by the training set's transform, with noiseless targets from the
/// training weights in the mapped coordinates.
inline TestSet generate_synthetic_test(const SyntheticSpec& spec, const Dataset& train,
                                       const std::vector<double>& true_weights,
                                       std::uint64_t test_seed) {
    detail::check_spec(spec);
    if (train.x.cols() != spec.d) throw dimension_error("training set dimension differs from spec");
    Rng rng(avalanche_mix(test_seed, 0));
    TestSet ts;
    ts.x = detail::draw_design(spec, rng);
    for (std::size_t j = 0; j < spec.d; ++j)
        for (std::size_t i = 0; i < spec.n; ++i)
            ts.x(i, j) = (ts.x(i, j) - train.column_means[j]) / train.column_norms[j];
    ts.y = matvec(ts.x, true_weights);
    return ts;
}

struct SplitResult {
    Dataset train;
    TestSet test;
};

/// Shuffles rows apart into train/test. The train side is re-centered (when
/// the input was centered) and re-normalized with its own statistics; the
/// test side is mapped by those statistics.
inline SplitResult split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw split_error("test_fraction must lie strictly between 0 and 1");
    std::size_t n = ds.x.rows();
    auto n_test = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test >= n)
        throw split_error("split leaves an empty train or test side");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(avalanche_mix(seed, 0));
    for (std::size_t j = 0; j + 1 < n; ++j) {
        std::size_t k = j + static_cast<std::size_t>(rng.next_below(n - j));
        std::swap(idx[j], idx[k]);
    }
    std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + n_test);
    std::vector<std::size_t> train_idx(idx.begin() + n_test, idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    std::size_t d = ds.x.cols();
    SplitResult res;
    res.train.feature_names = ds.feature_names;
    res.train.centered = ds.centered;
    res.train.x = Matrix(train_idx.size(), d);
    res.train.y.resize(train_idx.size());
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
        for (std::size_t j = 0; j < d; ++j) res.train.x(r, j) = ds.x(train_idx[r], j);
        res.train.y[r] = ds.y[train_idx[r]];
    }
    res.train.column_means = ds.centered ? detail::center_columns(res.train.x)
                                         : std::vector<double>(d, 0.0);
    res.train.column_norms = detail::normalize_columns(res.train.x);

    res.test.x = Matrix(test_idx.size(), d);
    res.test.y.resize(test_idx.size());
    for (std::size_t r = 0; r < test_idx.size(); ++r) {
        for (std::size_t j = 0; j < d; ++j)
            res.test.x(r, j) = (ds.x(test_idx[r], j) - res.train.column_means[j]) /
                               res.train.column_norms[j];
        res.test.y[r] = ds.y[test_idx[r]];
    }
    return res;
}

}  // namespace qsubset

#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "samplers.hpp"
#include "util.hpp"

namespace qsubset {

enum class Solver { exhaustive, sa, enumerate };

inline const char* solver_name(Solver s) {
    switch (s) {
        case Solver::exhaustive: return "exhaustive";
        case Solver::sa: return "sa";
        case Solver::enumerate: return "enumerate";
    }
    throw invalid_input("unknown solver");
}

inline Solver solver_from_name(const std::string& name) {
    if (name == "exhaustive") return Solver::exhaustive;
    if (name == "sa") return Solver::sa;
    if (name == "enumerate") return Solver::enumerate;
    throw invalid_input("unknown solver: '" + name + "'");
}

struct Timings {
    double compile_seconds = 0.0;  // model compilation up to the solver handoff
    double solve_seconds = 0.0;    // solver plus exact refit scoring
};

inline double mse(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w) {
    if (x.rows() != y.size()) throw dimension_error("mse: row count != target length");
    if (x.cols() != w.size()) throw dimension_error("mse: column count != weight length");
    if (x.rows() == 0) throw invalid_input("mse: no rows");
    double sse = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double pred = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) pred += w[c] * x(r, c);
        double resid = y[r] - pred;
        sse += resid * resid;
    }
    return sse / static_cast<double>(x.rows());
}

/// Result of one subset-selection fit. objective always equals
/// sse + lambda * cardinality for the refitted weights.
struct FitReport {
    std::vector<std::uint8_t> z;
    std::vector<double> w;
    int cardinality = 0;
    double objective = 0.0;
    double sse = 0.0;
    double mse_train = 0.0;
    std::optional<double> mse_test;
    double lambda = 0.0;
    Solver solver = Solver::exhaustive;
    Timings timings;
};

/// Scores a given selection: exact least-squares refit on the selected
/// columns, objective = sse + lambda * cardinality. The solver tag records
/// where the selection came from.
inline FitReport score(const Matrix& x, const std::vector<double>& y,
                       const std::vector<std::uint8_t>& z, double lambda,
                       Solver solver = Solver::exhaustive) {
    SubsetFit sf = score_subset(x, y, z, lambda);
    FitReport r;
    r.z = sf.z;
    r.w = sf.w;
    r.cardinality = sf.cardinality;
    r.objective = sf.objective;
    r.sse = sf.sse;
    r.mse_train = sf.sse / static_cast<double>(x.rows());
    r.lambda = lambda;
    r.solver = solver;
    return r;
}

/// JSON form of a report. Timing fields are nondeterministic, so they are
/// emitted only on request; everything else is a pure function of the inputs.
inline std::string fit_report_to_json(const FitReport& r, bool include_timings = false) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"solver\": \"" << solver_name(r.solver) << "\",\n";
    out << "  \"lambda\": " << detail::format_real(r.lambda) << ",\n";
    out << "  \"z\": \"" << detail::bits_to_string(r.z) << "\",\n";
    out << "  \"w\": [";
    for (std::size_t i = 0; i < r.w.size(); ++i)
        out << (i ? ", " : "") << detail::format_real(r.w[i]);
    out << "],\n";
    out << "  \"cardinality\": " << r.cardinality << ",\n";
    out << "  \"objective\": " << detail::format_real(r.objective) << ",\n";
    out << "  \"sse\": " << detail::format_real(r.sse) << ",\n";
    out << "  \"mse_train\": " << detail::format_real(r.mse_train);
    if (r.mse_test) out << ",\n  \"mse_test\": " << detail::format_real(*r.mse_test);
    if (include_timings) {
        out << ",\n  \"timings\": {\"compile_seconds\": "
            << detail::format_real(r.timings.compile_seconds)
            << ", \"solve_seconds\": " << detail::format_real(r.timings.solve_seconds) << "}";
    }
    out << "\n}\n";
    return out.str();
}

}  // namespace qsubset

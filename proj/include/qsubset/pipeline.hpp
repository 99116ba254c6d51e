#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "pbf.hpp"
#include "qubo.hpp"
#include "regress.hpp"
#include "samplers.hpp"

namespace qsubset {

struct FitOptions {
    double lambda = 0.0;
    Solver solver = Solver::exhaustive;
    std::optional<double> alpha;    // absent: use 2/(d+1)
    AnnealSchedule schedule;        // sa solver only
    int num_threads = 1;
    std::optional<double> penalty;  // absent: derive from the compiled polynomial
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Exact refit of every distinct selection proposed by the sampler; the
// winner is the best refit objective, ties going to the earliest read.
inline SubsetFit best_refit(const Matrix& x, const std::vector<double>& y, double lambda,
                            const QuboModel& q, const SampleSet& ss) {
    std::map<std::vector<std::uint8_t>, SubsetFit> memo;
    const SubsetFit* best = nullptr;
    for (const auto& read : ss.reads) {
        std::vector<std::uint8_t> z(read.assignment.begin(),
                                    read.assignment.begin() + q.num_original);
        auto it = memo.find(z);
        if (it == memo.end())
            it = memo.emplace(z, score_subset(x, y, z, lambda)).first;
        if (!best || it->second.objective < best->objective) best = &it->second;
    }
    return *best;
}

}  // namespace detail

/// Runs one subset-selection fit with the chosen solver.
///
/// The sampler-based solvers compile the penalized objective into a quartic
/// polynomial over the selection bits, reduce it to a QUBO, minimize that,
/// and then refit each proposed subset exactly; the reported objective is
/// always the exact one. Preprocessing covers everything up to the solver
/// handoff.
inline FitReport fit(const Matrix& x, const std::vector<double>& y, const FitOptions& opt,
                     const TestSet* test = nullptr) {
    if (opt.lambda < 0.0) throw invalid_input("fit: lambda must be non-negative");
    FitReport report;
    report.lambda = opt.lambda;
    report.solver = opt.solver;
    auto t0 = std::chrono::steady_clock::now();
    SubsetFit best;
    if (opt.solver == Solver::exhaustive) {
        best = exhaustive_subset_search(x, y, opt.lambda);
        report.timings.solve_seconds = detail::seconds_since(t0);
    } else {
        double alpha = opt.alpha ? *opt.alpha : default_alpha(x.cols());
        GramSummary g = gram_summary(x, y, alpha);
        MultilinearPoly poly = compile_objective(g, x, y, opt.lambda);
        QuboModel q = quadratize(poly, opt.penalty);
        report.timings.compile_seconds = detail::seconds_since(t0);
        auto t1 = std::chrono::steady_clock::now();
        SampleSet ss = opt.solver == Solver::sa
                           ? simulated_anneal(q, opt.schedule, opt.num_threads)
                           : enumerate_qubo(q);
        best = detail::best_refit(x, y, opt.lambda, q, ss);
        report.timings.solve_seconds = detail::seconds_since(t1);
    }
    report.z = best.z;
    report.w = best.w;
    report.cardinality = best.cardinality;
    report.objective = best.objective;
    report.sse = best.sse;
    report.mse_train = best.sse / static_cast<double>(x.rows());
    if (test) report.mse_test = mse(test->x, test->y, report.w);
    return report;
}

/// Grid of synthetic benchmark cells: every dimension crossed with every
/// value of the product lambda * d.
struct ExperimentSpec {
    std::vector<std::size_t> dims = {5, 6, 7, 9, 10};
    std::vector<double> lambda_times_d = {10.0, 1.0, 0.1, 0.01, 0.001};
    std::size_t n = 300;
    std::uint64_t seed = 1;
    int num_reads = 100;
    int sweeps = 1000;
    int num_threads = 1;
    XDistribution x_distribution = XDistribution::uniform;
};

struct SweepRow {
    std::size_t n = 0;
    std::size_t d = 0;
    double lambda_times_d = 0.0;
    double lambda = 0.0;
    int card_classical = 0;
    int card_qubo = 0;
    double objective_classical = 0.0;
    double objective_qubo = 0.0;
    double mse_train_classical = 0.0;
    double mse_train_qubo = 0.0;
    double mse_test_classical = 0.0;
    double mse_test_qubo = 0.0;
    double preprocessing_seconds = 0.0;
    double processing_seconds = 0.0;
};

/// For each cell: a fresh noiseless sparse dataset (k_true = floor(d/2)),
/// an exhaustive fit, and a sampler fit, evaluated on held-out rows drawn
/// from the same model. Deterministic in spec.seed.
inline std::vector<SweepRow> run_synthetic_sweep(const ExperimentSpec& spec) {
    if (spec.dims.empty()) throw invalid_input("run_synthetic_sweep: no dimensions");
    if (spec.lambda_times_d.empty()) throw invalid_input("run_synthetic_sweep: no lambda values");
    std::vector<SweepRow> rows;
    for (std::size_t d : spec.dims) {
        SyntheticSpec syn;
        syn.n = spec.n;
        syn.d = d;
        syn.k_true = d / 2;
        syn.seed = avalanche_mix(spec.seed, d);
        syn.x_distribution = spec.x_distribution;
        SyntheticResult data = generate_synthetic(syn);
        TestSet test = generate_synthetic_test(syn, data.dataset, data.true_weights,
                                               avalanche_mix(syn.seed, 1));
        for (std::size_t li = 0; li < spec.lambda_times_d.size(); ++li) {
            double lam_d = spec.lambda_times_d[li];
            FitOptions classical;
            classical.lambda = lam_d / static_cast<double>(d);
            classical.solver = Solver::exhaustive;
            FitReport rc = fit(data.dataset.x, data.dataset.y, classical, &test);

            FitOptions sampled = classical;
            sampled.solver = Solver::sa;
            sampled.num_threads = spec.num_threads;
            sampled.schedule.num_reads = spec.num_reads;
            sampled.schedule.sweeps = spec.sweeps;
            sampled.schedule.seed = avalanche_mix(syn.seed, 2 + li);
            FitReport rq = fit(data.dataset.x, data.dataset.y, sampled, &test);

            SweepRow row;
            row.n = spec.n;
            row.d = d;
            row.lambda_times_d = lam_d;
            row.lambda = sampled.lambda;
            row.card_classical = rc.cardinality;
            row.card_qubo = rq.cardinality;
            row.objective_classical = rc.objective;
            row.objective_qubo = rq.objective;
            row.mse_train_classical = rc.mse_train;
            row.mse_train_qubo = rq.mse_train;
            row.mse_test_classical = *rc.mse_test;
            row.mse_test_qubo = *rq.mse_test;
            row.preprocessing_seconds = rq.timings.compile_seconds;
            row.processing_seconds = rq.timings.solve_seconds;
            rows.push_back(row);
        }
    }
    return rows;
}

struct DiabetesRow {
    double lambda = 0.0;
    int card_classical = 0;
    int card_qubo = 0;
    double objective_classical = 0.0;
    double objective_qubo = 0.0;
    double preprocessing_seconds = 0.0;
    double processing_seconds = 0.0;
};

inline std::vector<double> default_diabetes_lambdas() {
    return {10000, 1000, 100, 10, 1};
}

/// Exhaustive-versus-sampler comparison across a lambda grid on a fixed
/// dataset (in practice the 442-row clinical benchmark).
inline std::vector<DiabetesRow> run_lambda_grid(const Dataset& ds,
                                                const std::vector<double>& lambdas,
                                                int num_reads, int sweeps, std::uint64_t seed,
                                                int num_threads = 1) {
    if (lambdas.empty()) throw invalid_input("run_lambda_grid: no lambda values");
    std::vector<DiabetesRow> rows;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        FitOptions classical;
        classical.lambda = lambdas[li];
        classical.solver = Solver::exhaustive;
        FitReport rc = fit(ds.x, ds.y, classical);

        FitOptions sampled = classical;
        sampled.solver = Solver::sa;
        sampled.num_threads = num_threads;
        sampled.schedule.num_reads = num_reads;
        sampled.schedule.sweeps = sweeps;
        sampled.schedule.seed = avalanche_mix(seed, li);
        FitReport rq = fit(ds.x, ds.y, sampled);

        DiabetesRow row;
        row.lambda = lambdas[li];
        row.card_classical = rc.cardinality;
        row.card_qubo = rq.cardinality;
        row.objective_classical = rc.objective;
        row.objective_qubo = rq.objective;
        row.preprocessing_seconds = rq.timings.compile_seconds;
        row.processing_seconds = rq.timings.solve_seconds;
        rows.push_back(row);
    }
    return rows;
}

// ---- report writers ----------------------------------------------------

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                            bool include_timings = false) {
    out << "N,d,lambda_times_d,card_classical,card_qubo,objective_classical,objective_qubo";
    if (include_timings) out << ",preprocessing_seconds,processing_seconds";
    out << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << r.d << ',' << detail::format_real(r.lambda_times_d) << ','
            << r.card_classical << ',' << r.card_qubo << ','
            << detail::format_real(r.objective_classical) << ','
            << detail::format_real(r.objective_qubo);
        if (include_timings)
            out << ',' << detail::format_real(r.preprocessing_seconds) << ','
                << detail::format_real(r.processing_seconds);
        out << '\n';
    }
}

inline void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows,
                              bool include_timings = false) {
    out << std::left << std::setw(6) << "N" << std::setw(4) << "d" << std::setw(10) << "lam*d"
        << std::setw(9) << "card_cl" << std::setw(9) << "card_qb" << std::setw(14) << "obj_cl"
        << std::setw(14) << "obj_qb";
    if (include_timings) out << std::setw(11) << "preproc_s" << std::setw(11) << "solve_s";
    out << '\n';
    for (const auto& r : rows) {
        std::ostringstream lam, oc, oq;
        lam << std::fixed << std::setprecision(4) << r.lambda_times_d;
        oc << std::fixed << std::setprecision(4) << r.objective_classical;
        oq << std::fixed << std::setprecision(4) << r.objective_qubo;
        out << std::left << std::setw(6) << r.n << std::setw(4) << r.d << std::setw(10)
            << lam.str() << std::setw(9) << r.card_classical << std::setw(9) << r.card_qubo
            << std::setw(14) << oc.str() << std::setw(14) << oq.str();
        if (include_timings) {
            std::ostringstream tp, ts;
            tp << std::fixed << std::setprecision(4) << r.preprocessing_seconds;
            ts << std::fixed << std::setprecision(4) << r.processing_seconds;
            out << std::setw(11) << tp.str() << std::setw(11) << ts.str();
        }
        out << '\n';
    }
}

inline void write_sweep_json(std::ostream& out, const ExperimentSpec& spec,
                             const std::vector<SweepRow>& rows, bool include_timings = false) {
    out << "{\n  \"config\": {\"n\": " << spec.n << ", \"dims\": [";
    for (std::size_t i = 0; i < spec.dims.size(); ++i) out << (i ? ", " : "") << spec.dims[i];
    out << "], \"lambda_times_d\": [";
    for (std::size_t i = 0; i < spec.lambda_times_d.size(); ++i)
        out << (i ? ", " : "") << detail::format_real(spec.lambda_times_d[i]);
    out << "], \"num_reads\": " << spec.num_reads << ", \"sweeps\": " << spec.sweeps
        << ", \"seed\": " << spec.seed << "},\n  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << (i ? ",\n" : "\n") << "    {\"n\": " << r.n << ", \"d\": " << r.d
            << ", \"lambda_times_d\": " << detail::format_real(r.lambda_times_d)
            << ", \"lambda\": " << detail::format_real(r.lambda)
            << ", \"card_classical\": " << r.card_classical
            << ", \"card_qubo\": " << r.card_qubo
            << ", \"objective_classical\": " << detail::format_real(r.objective_classical)
            << ", \"objective_qubo\": " << detail::format_real(r.objective_qubo)
            << ", \"mse_train_classical\": " << detail::format_real(r.mse_train_classical)
            << ", \"mse_train_qubo\": " << detail::format_real(r.mse_train_qubo)
            << ", \"mse_test_classical\": " << detail::format_real(r.mse_test_classical)
            << ", \"mse_test_qubo\": " << detail::format_real(r.mse_test_qubo);
        if (include_timings)
            out << ", \"preprocessing_seconds\": " << detail::format_real(r.preprocessing_seconds)
                << ", \"processing_seconds\": " << detail::format_real(r.processing_seconds);
        out << "}";
    }
    out << (rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

inline void write_lambda_grid_csv(std::ostream& out, const std::vector<DiabetesRow>& rows,
                                  bool include_timings = false) {
    out << "lambda,card_classical,card_qubo,objective_classical,objective_qubo";
    if (include_timings) out << ",preprocessing_seconds,processing_seconds";
    out << '\n';
    for (const auto& r : rows) {
        out << detail::format_real(r.lambda) << ',' << r.card_classical << ',' << r.card_qubo
            << ',' << detail::format_real(r.objective_classical) << ','
            << detail::format_real(r.objective_qubo);
        if (include_timings)
            out << ',' << detail::format_real(r.preprocessing_seconds) << ','
                << detail::format_real(r.processing_seconds);
        out << '\n';
    }
}

inline void write_lambda_grid_table(std::ostream& out, const std::vector<DiabetesRow>& rows,
                                    bool include_timings = false) {
    out << std::left << std::setw(12) << "lambda" << std::setw(9) << "card_cl" << std::setw(9)
        << "card_qb" << std::setw(16) << "obj_cl" << std::setw(16) << "obj_qb";
    if (include_timings) out << std::setw(11) << "preproc_s" << std::setw(11) << "solve_s";
    out << '\n';
    for (const auto& r : rows) {
        std::ostringstream lam, oc, oq;
        lam << std::fixed << std::setprecision(4) << r.lambda;
        oc << std::fixed << std::setprecision(4) << r.objective_classical;
        oq << std::fixed << std::setprecision(4) << r.objective_qubo;
        out << std::left << std::setw(12) << lam.str() << std::setw(9) << r.card_classical
            << std::setw(9) << r.card_qubo << std::setw(16) << oc.str() << std::setw(16)
            << oq.str();
        if (include_timings) {
            std::ostringstream tp, ts;
            tp << std::fixed << std::setprecision(4) << r.preprocessing_seconds;
            ts << std::fixed << std::setprecision(4) << r.processing_seconds;
            out << std::setw(11) << tp.str() << std::setw(11) << ts.str();
        }
        out << '\n';
    }
}

}  // namespace qsubset

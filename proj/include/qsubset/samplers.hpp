#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "qubo.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace qsubset {

/// One sampler outcome: an assignment and its exactly re-evaluated energy.
struct Read {
    std::vector<std::uint8_t> assignment;
    double energy = 0.0;
    int read_index = 0;
};

struct SampleSet {
    std::vector<Read> reads;
    std::size_t best_index = 0;

    const Read& best() const {
        if (reads.empty()) throw invalid_input("sample set is empty");
        return reads[best_index];
    }

    void recompute_best() {
        best_index = 0;
        for (std::size_t i = 1; i < reads.size(); ++i) {
            if (reads[i].energy < reads[best_index].energy ||
                (reads[i].energy == reads[best_index].energy &&
                 reads[i].read_index < reads[best_index].read_index))
                best_index = i;
        }
    }
};

/// A subset choice together with its exact least-squares refit.
struct SubsetFit {
    std::vector<std::uint8_t> z;
    std::vector<double> w;  // full length, zero off the support
    double objective = 0.0;
    double sse = 0.0;
    int cardinality = 0;
};

/// Exact refit of the columns selected by z, scored as sse + lambda * |z|.
inline SubsetFit score_subset(const Matrix& x, const std::vector<double>& y,
                              const std::vector<std::uint8_t>& z, double lambda) {
    if (z.size() != x.cols()) throw dimension_error("score_subset: selection length != columns");
    if (x.rows() != y.size()) throw dimension_error("score_subset: row count != target length");
    if (lambda < 0.0) throw invalid_input("score_subset: lambda must be non-negative");
    SubsetFit fit;
    fit.z = z;
    fit.w.assign(x.cols(), 0.0);
    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i]) sel.push_back(i);
    fit.cardinality = static_cast<int>(sel.size());
    if (!sel.empty()) {
        Matrix sub(x.rows(), sel.size());
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < sel.size(); ++c) sub(r, c) = x(r, sel[c]);
        auto ws = least_squares(sub, y);
        for (std::size_t c = 0; c < sel.size(); ++c) fit.w[sel[c]] = ws[c];
    }
    double sse = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double pred = 0.0;
        for (auto i : sel) pred += fit.w[i] * x(r, i);
        double resid = y[r] - pred;
        sse += resid * resid;
    }
    fit.sse = sse;
    fit.objective = sse + lambda * static_cast<double>(fit.cardinality);
    return fit;
}

/// Tries every subset of columns (d <= 25) and returns the best exact refit.
/// Ties on objective value go to the smaller cardinality, then to the
/// lexicographically smallest selection vector.
inline SubsetFit exhaustive_subset_search(const Matrix& x, const std::vector<double>& y,
                                          double lambda) {
    std::size_t d = x.cols();
    if (d == 0) throw invalid_input("exhaustive_subset_search: no columns");
    if (d > 25) throw size_guard_error("exhaustive_subset_search: d > 25 would enumerate 2^" +
                                       std::to_string(d) + " subsets");
    SubsetFit best;
    bool have = false;
    std::vector<std::uint8_t> z(d, 0);
    std::uint64_t limit = std::uint64_t{1} << d;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        for (std::size_t i = 0; i < d; ++i) z[i] = (mask >> i) & 1U;
        SubsetFit fit = score_subset(x, y, z, lambda);
        bool better = !have || fit.objective < best.objective ||
                      (fit.objective == best.objective &&
                       (fit.cardinality < best.cardinality ||
                        (fit.cardinality == best.cardinality &&
                         std::lexicographical_compare(fit.z.begin(), fit.z.end(),
                                                      best.z.begin(), best.z.end()))));
        if (better) {
            best = std::move(fit);
            have = true;
        }
    }
    return best;
}

/// Evaluates all 2^num_vars assignments (num_vars <= 22) and returns every
/// minimizer, read_index being the assignment's bit mask. best is the
/// minimizer with the lowest mask.
inline SampleSet enumerate_qubo(const QuboModel& q) {
    if (q.num_vars <= 0) throw invalid_input("enumerate_qubo: model has no variables");
    if (q.num_vars > 22)
        throw size_guard_error("enumerate_qubo: num_vars > 22 would enumerate 2^" +
                               std::to_string(q.num_vars) + " assignments");
    std::size_t n = static_cast<std::size_t>(q.num_vars);
    std::uint64_t limit = std::uint64_t{1} << n;
    std::vector<std::uint8_t> bits(n, 0);
    double best_energy = 0.0;
    std::vector<std::uint64_t> argmin;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        for (std::size_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1U;
        double e = qubo_value(q, bits);
        if (argmin.empty() || e < best_energy) {
            best_energy = e;
            argmin.assign(1, mask);
        } else if (e == best_energy) {
            argmin.push_back(mask);
        }
    }
    SampleSet ss;
    ss.reads.reserve(argmin.size());
    for (auto mask : argmin) {
        Read r;
        r.assignment.resize(n);
        for (std::size_t i = 0; i < n; ++i) r.assignment[i] = (mask >> i) & 1U;
        r.energy = best_energy;
        r.read_index = static_cast<int>(mask);
        ss.reads.push_back(std::move(r));
    }
    ss.best_index = 0;
    return ss;
}

/// Annealing run parameters. Non-positive betas are replaced by the
/// model-derived defaults at run time.
struct AnnealSchedule {
    int num_reads = 100;
    int sweeps = 1000;
    double beta_initial = 0.0;
    double beta_final = 0.0;
    std::uint64_t seed = 0;
};

/// Model-derived temperature ladder endpoints. The hot end makes the largest
/// single-flip move acceptable about half the time; the cold end makes the
/// smallest nonzero move acceptable about 1% of the time.
inline std::pair<double, double> default_betas(const QuboModel& q) {
    double max_effect = 0.0;
    std::vector<double> effect(static_cast<std::size_t>(q.num_vars), 0.0);
    for (int i = 0; i < q.num_vars; ++i)
        effect[static_cast<std::size_t>(i)] = std::abs(q.linear[static_cast<std::size_t>(i)]);
    for (const auto& [key, c] : q.quadratic) {
        effect[static_cast<std::size_t>(key.first)] += std::abs(c);
        effect[static_cast<std::size_t>(key.second)] += std::abs(c);
    }
    for (double e : effect) max_effect = std::max(max_effect, e);
    double min_coeff = 0.0;
    for (int i = 0; i < q.num_vars; ++i) {
        double c = std::abs(q.linear[static_cast<std::size_t>(i)]);
        if (c > 0.0 && (min_coeff == 0.0 || c < min_coeff)) min_coeff = c;
    }
    for (const auto& [key, c] : q.quadratic) {
        double a = std::abs(c);
        if (a > 0.0 && (min_coeff == 0.0 || a < min_coeff)) min_coeff = a;
    }
    if (max_effect == 0.0 || min_coeff == 0.0)
        throw invalid_input("default_betas: model has no nonzero coefficients");
    constexpr double ln2 = 0.69314718055994530942;
    constexpr double ln100 = 4.6051701859880913680;
    return {ln2 / max_effect, ln100 / min_coeff};
}

namespace detail {

inline std::vector<double> beta_ladder(double beta_initial, double beta_final, int sweeps) {
    std::vector<double> betas(static_cast<std::size_t>(sweeps));
    if (sweeps == 1) {
        betas[0] = beta_final;
        return betas;
    }
    double ratio = beta_final / beta_initial;
    for (int s = 0; s < sweeps; ++s)
        betas[static_cast<std::size_t>(s)] =
            beta_initial * std::pow(ratio, static_cast<double>(s) / (sweeps - 1));
    return betas;
}

inline void anneal_one_read(const QuboModel& q,
                            const std::vector<std::vector<std::pair<int, double>>>& adj,
                            const std::vector<double>& betas, std::uint64_t seed, int read_index,
                            Read& out) {
    std::size_t n = static_cast<std::size_t>(q.num_vars);
    Rng rng(avalanche_mix(seed, static_cast<std::uint64_t>(read_index)));
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = rng.next_unit() < 0.5 ? 1 : 0;
    for (double beta : betas) {
        for (std::size_t i = 0; i < n; ++i) {
            double field = q.linear[i];
            for (const auto& [j, c] : adj[i])
                if (bits[static_cast<std::size_t>(j)]) field += c;
            double delta = (bits[i] ? -1.0 : 1.0) * field;
            // the uniform draw happens only for uphill moves, so the stream
            // length depends on the trajectory; determinism per read is all
            // that matters here
            if (delta <= 0.0 || rng.next_unit() < std::exp(-beta * delta))
                bits[i] ^= 1U;
        }
    }
    out.assignment = std::move(bits);
    out.energy = qubo_value(q, out.assignment);  // exact, not the incremental sum
    out.read_index = read_index;
}

}  // namespace detail

/// Metropolis simulated annealing with a geometric temperature ladder.
/// Each read runs on its own substream of the schedule seed, so results are
/// independent of thread count, and a run with more reads extends (rather
/// than reshuffles) a run with fewer.
inline SampleSet simulated_anneal(const QuboModel& q, const AnnealSchedule& schedule,
                                  int num_threads = 1) {
    if (q.num_vars <= 0) throw invalid_input("simulated_anneal: model has no variables");
    if (schedule.num_reads < 1) throw invalid_input("simulated_anneal: num_reads must be >= 1");
    if (schedule.sweeps < 1) throw invalid_input("simulated_anneal: sweeps must be >= 1");
    if (num_threads < 1) throw invalid_input("simulated_anneal: num_threads must be >= 1");
    double beta_initial = schedule.beta_initial;
    double beta_final = schedule.beta_final;
    if (beta_initial <= 0.0 || beta_final <= 0.0) {
        auto [bi, bf] = default_betas(q);
        if (beta_initial <= 0.0) beta_initial = bi;
        if (beta_final <= 0.0) beta_final = bf;
    }
    if (!(beta_final > beta_initial))
        throw invalid_input("simulated_anneal: beta_final must exceed beta_initial");
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(q.num_vars));
    for (const auto& [key, c] : q.quadratic) {
        adj[static_cast<std::size_t>(key.first)].emplace_back(key.second, c);
        adj[static_cast<std::size_t>(key.second)].emplace_back(key.first, c);
    }
    auto betas = detail::beta_ladder(beta_initial, beta_final, schedule.sweeps);

    SampleSet ss;
    ss.reads.resize(static_cast<std::size_t>(schedule.num_reads));
    auto run_block = [&](int first, int past) {
        for (int r = first; r < past; ++r)
            detail::anneal_one_read(q, adj, betas, schedule.seed, r,
                                    ss.reads[static_cast<std::size_t>(r)]);
    };
    int workers = std::min(num_threads, schedule.num_reads);
    if (workers <= 1) {
        run_block(0, schedule.num_reads);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        int base = schedule.num_reads / workers, extra = schedule.num_reads % workers;
        int start = 0;
        for (int w = 0; w < workers; ++w) {
            int count = base + (w < extra ? 1 : 0);
            pool.emplace_back(run_block, start, start + count);
            start += count;
        }
        for (auto& t : pool) t.join();
    }
    ss.recompute_best();
    return ss;
}

inline std::string sample_set_to_json(const SampleSet& ss) {
    std::ostringstream out;
    auto emit_read = [&](const Read& r, const char* indent) {
        out << indent << "{\"assignment\": \"" << detail::bits_to_string(r.assignment)
            << "\", \"energy\": " << detail::format_real(r.energy)
            << ", \"read_index\": " << r.read_index << "}";
    };
    out << "{\n  \"reads\": [";
    for (std::size_t i = 0; i < ss.reads.size(); ++i) {
        out << (i ? ",\n" : "\n");
        emit_read(ss.reads[i], "    ");
    }
    out << (ss.reads.empty() ? "],\n" : "\n  ],\n");
    out << "  \"best\": ";
    if (ss.reads.empty())
        out << "null";
    else
        emit_read(ss.best(), "");
    out << "\n}\n";
    return out.str();
}

}  // namespace qsubset

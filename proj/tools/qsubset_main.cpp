// Command-line front end: dataset generation, subset-selection fits,
// benchmark sweeps, and QUBO export/solve round-trips.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qsubset/qsubset.hpp>

namespace {

using namespace qsubset;

XDistribution parse_dist(const std::string& name) {
    if (name == "uniform") return XDistribution::uniform;
    if (name == "normal") return XDistribution::normal;
    throw invalid_input("unknown distribution: '" + name + "' (expected uniform or normal)");
}

std::string sidecar_path(const std::string& csv_path) {
    auto dot = csv_path.find_last_of('.');
    auto slash = csv_path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

void write_sidecar(const std::string& path, const SyntheticSpec& spec,
                   const SyntheticResult& res) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot open file for writing: " + path);
    out << "{\n";
    out << "  \"n\": " << spec.n << ",\n";
    out << "  \"d\": " << spec.d << ",\n";
    out << "  \"k_true\": " << spec.k_true << ",\n";
    out << "  \"seed\": " << spec.seed << ",\n";
    out << "  \"x_distribution\": \""
        << (spec.x_distribution == XDistribution::uniform ? "uniform" : "normal") << "\",\n";
    out << "  \"w_min\": " << detail::format_real(spec.w_min) << ",\n";
    out << "  \"w_max\": " << detail::format_real(spec.w_max) << ",\n";
    out << "  \"support\": [";
    for (std::size_t i = 0; i < res.support.size(); ++i)
        out << (i ? ", " : "") << res.support[i];
    out << "],\n  \"true_weights\": [";
    for (std::size_t i = 0; i < res.true_weights.size(); ++i)
        out << (i ? ", " : "") << detail::format_real(res.true_weights[i]);
    out << "],\n  \"column_norms\": [";
    for (std::size_t i = 0; i < res.dataset.column_norms.size(); ++i)
        out << (i ? ", " : "") << detail::format_real(res.dataset.column_norms[i]);
    out << "]\n}\n";
}

void print_fit_table(std::ostream& out, const FitReport& r, bool with_timings) {
    out << "solver       " << solver_name(r.solver) << '\n';
    out << "lambda       " << detail::format_real(r.lambda) << '\n';
    out << "selection    " << detail::bits_to_string(r.z) << '\n';
    out << "cardinality  " << r.cardinality << '\n';
    out << "objective    " << detail::format_real(r.objective) << '\n';
    out << "sse          " << detail::format_real(r.sse) << '\n';
    out << "mse_train    " << detail::format_real(r.mse_train) << '\n';
    if (r.mse_test) out << "mse_test     " << detail::format_real(*r.mse_test) << '\n';
    out << "weights      [";
    for (std::size_t i = 0; i < r.w.size(); ++i)
        out << (i ? ", " : "") << detail::format_real(r.w[i]);
    out << "]\n";
    if (with_timings) {
        out << "compile_s    " << detail::format_real(r.timings.compile_seconds) << '\n';
        out << "solve_s      " << detail::format_real(r.timings.solve_seconds) << '\n';
    }
}

void print_fit_csv(std::ostream& out, const FitReport& r, bool with_timings) {
    out << "solver,lambda,z,cardinality,objective,sse,mse_train";
    if (r.mse_test) out << ",mse_test";
    if (with_timings) out << ",compile_seconds,solve_seconds";
    out << '\n';
    out << solver_name(r.solver) << ',' << detail::format_real(r.lambda) << ','
        << detail::bits_to_string(r.z) << ',' << r.cardinality << ','
        << detail::format_real(r.objective) << ',' << detail::format_real(r.sse) << ','
        << detail::format_real(r.mse_train);
    if (r.mse_test) out << ',' << detail::format_real(*r.mse_test);
    if (with_timings)
        out << ',' << detail::format_real(r.timings.compile_seconds) << ','
            << detail::format_real(r.timings.solve_seconds);
    out << '\n';
}

struct LambdaArgs {
    double lambda = -1.0;
    double lambda_times_d = -1.0;

    void add_to(CLI::App* cmd) {
        auto* a = cmd->add_option("--lambda", lambda, "subset-size penalty")
                      ->check(CLI::NonNegativeNumber);
        auto* b = cmd->add_option("--lambda-times-d", lambda_times_d,
                                  "penalty given as the product lambda*d")
                      ->check(CLI::NonNegativeNumber);
        a->excludes(b);
        b->excludes(a);
    }

    bool given() const { return lambda >= 0.0 || lambda_times_d >= 0.0; }

    double resolve(std::size_t d) const {
        if (lambda >= 0.0) return lambda;
        if (lambda_times_d >= 0.0) return lambda_times_d / static_cast<double>(d);
        throw invalid_input("one of --lambda or --lambda-times-d is required");
    }
};

int run(int argc, char** argv) {
    CLI::App app{"best-subset sparse regression via binary optimization"};
    app.require_subcommand(1);

    // gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic sparse dataset");
    SyntheticSpec gspec;
    std::string gen_dist = "uniform";
    std::string gen_output;
    bool gen_k_given = false;
    gen->add_option("--n", gspec.n, "number of rows")->capture_default_str();
    gen->add_option("--d", gspec.d, "number of features")->required();
    gen->add_option("--k", gspec.k_true, "true support size (default floor(d/2))")
        ->each([&](const std::string&) { gen_k_given = true; });
    gen->add_option("--seed", gspec.seed, "generation seed")->capture_default_str();
    gen->add_option("--x-dist", gen_dist, "feature distribution: uniform or normal")
        ->capture_default_str();
    gen->add_option("--w-min", gspec.w_min, "smallest true weight magnitude")
        ->capture_default_str();
    gen->add_option("--w-max", gspec.w_max, "largest true weight magnitude")
        ->capture_default_str();
    gen->add_option("-o,--output", gen_output, "output CSV path")->required();

    // fit ---------------------------------------------------------------
    auto* fitc = app.add_subcommand("fit", "select a subset and refit on one dataset");
    std::string fit_csv, fit_target, fit_test, fit_solver = "exhaustive", fit_format = "json";
    LambdaArgs fit_lambda;
    FitOptions fopt;
    bool fit_center = false, fit_timings = false;
    fitc->add_option("csv", fit_csv, "training data CSV")->required();
    fit_lambda.add_to(fitc);
    fitc->add_option("--solver", fit_solver, "exhaustive, sa, or enumerate")
        ->capture_default_str();
    fitc->add_option("--target", fit_target, "target column name (default: last column)");
    fitc->add_option("--test", fit_test, "held-out CSV scored with the trained transform");
    fitc->add_option("--alpha", fopt.alpha, "series parameter in (0, 2/(d+1)] (default 2/(d+1))");
    fitc->add_option("--penalty", fopt.penalty, "quadratization penalty (default: derived)");
    fitc->add_option("--threads", fopt.num_threads, "annealing worker threads")
        ->capture_default_str();
    fitc->add_option("--seed", fopt.schedule.seed, "annealing seed")->capture_default_str();
    fitc->add_option("--reads", fopt.schedule.num_reads, "annealing reads")
        ->capture_default_str();
    fitc->add_option("--sweeps", fopt.schedule.sweeps, "annealing sweeps per read")
        ->capture_default_str();
    fitc->add_option("--beta-initial", fopt.schedule.beta_initial,
                     "hot inverse temperature (default: derived)");
    fitc->add_option("--beta-final", fopt.schedule.beta_final,
                     "cold inverse temperature (default: derived)");
    fitc->add_flag("--center", fit_center, "subtract feature means before normalization");
    fitc->add_option("--format", fit_format, "json, csv, or table")->capture_default_str();
    fitc->add_flag("--with-timings", fit_timings, "include wall-clock timings in the output");

    // sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "synthetic benchmark across d and lambda*d");
    ExperimentSpec espec;
    std::string sweep_dist = "uniform", sweep_format = "table";
    bool sweep_timings = false, sweep_full = false;
    sweep->add_option("--n", espec.n, "rows per dataset")->capture_default_str();
    sweep->add_option("--dims", espec.dims, "dimensions to benchmark")->delimiter(',');
    sweep->add_option("--lambda-times-d", espec.lambda_times_d, "penalty grid (lambda*d)")
        ->delimiter(',');
    sweep->add_option("--seed", espec.seed, "master seed")->capture_default_str();
    sweep->add_option("--reads", espec.num_reads, "annealing reads")->capture_default_str();
    sweep->add_option("--sweeps", espec.sweeps, "annealing sweeps per read")
        ->capture_default_str();
    sweep->add_option("--threads", espec.num_threads, "annealing worker threads")
        ->capture_default_str();
    sweep->add_option("--x-dist", sweep_dist, "feature distribution")->capture_default_str();
    sweep->add_flag("--full-scale", sweep_full, "use 3000 rows per dataset");
    sweep->add_option("--format", sweep_format, "table, csv, or json")->capture_default_str();
    sweep->add_flag("--with-timings", sweep_timings, "include wall-clock timings");

    // diabetes ----------------------------------------------------------
    auto* diab = app.add_subcommand("diabetes", "lambda grid on a fixed clinical dataset");
    std::string diab_csv, diab_format = "table";
    std::vector<double> diab_lambdas = default_diabetes_lambdas();
    int diab_reads = 100, diab_sweeps = 1000, diab_threads = 1;
    std::uint64_t diab_seed = 0;
    bool diab_center = true, diab_timings = false;
    diab->add_option("csv", diab_csv, "dataset CSV (last column is the target)")->required();
    diab->add_option("--lambdas", diab_lambdas, "penalty grid")->delimiter(',');
    diab->add_option("--reads", diab_reads, "annealing reads")->capture_default_str();
    diab->add_option("--sweeps", diab_sweeps, "annealing sweeps per read")
        ->capture_default_str();
    diab->add_option("--seed", diab_seed, "annealing seed")->capture_default_str();
    diab->add_option("--threads", diab_threads, "annealing worker threads")
        ->capture_default_str();
    diab->add_flag("--center,!--no-center", diab_center,
                   "subtract feature means before normalization (default on)");
    diab->add_option("--format", diab_format, "table, csv, or json")->capture_default_str();
    diab->add_flag("--with-timings", diab_timings, "include wall-clock timings");

    // export-qubo -------------------------------------------------------
    auto* expq = app.add_subcommand("export-qubo", "compile a dataset into a binary model");
    std::string exp_csv, exp_target, exp_output, exp_format = "qubo";
    LambdaArgs exp_lambda;
    std::optional<double> exp_alpha, exp_penalty;
    bool exp_center = false;
    expq->add_option("csv", exp_csv, "training data CSV")->required();
    exp_lambda.add_to(expq);
    expq->add_option("--target", exp_target, "target column name (default: last column)");
    expq->add_option("--alpha", exp_alpha, "series parameter (default 2/(d+1))");
    expq->add_option("--penalty", exp_penalty, "quadratization penalty (default: derived)");
    expq->add_flag("--center", exp_center, "subtract feature means before normalization");
    expq->add_option("--format", exp_format, "qubo (text) or poly (JSON, before reduction)")
        ->capture_default_str();
    expq->add_option("-o,--output", exp_output, "output path (default: stdout)");

    // solve-qubo --------------------------------------------------------
    auto* solq = app.add_subcommand("solve-qubo", "minimize a binary model from its text form");
    std::string sol_path, sol_method = "sa";
    AnnealSchedule sol_sched;
    int sol_threads = 1;
    solq->add_option("file", sol_path, "QUBO text file")->required();
    solq->add_option("--method", sol_method, "sa or enumerate")->capture_default_str();
    solq->add_option("--reads", sol_sched.num_reads, "annealing reads")->capture_default_str();
    solq->add_option("--sweeps", sol_sched.sweeps, "annealing sweeps per read")
        ->capture_default_str();
    solq->add_option("--seed", sol_sched.seed, "annealing seed")->capture_default_str();
    solq->add_option("--beta-initial", sol_sched.beta_initial,
                     "hot inverse temperature (default: derived)");
    solq->add_option("--beta-final", sol_sched.beta_final,
                     "cold inverse temperature (default: derived)");
    solq->add_option("--threads", sol_threads, "annealing worker threads")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    // flag completeness is a usage problem, caught before any file is touched
    if ((fitc->parsed() && !fit_lambda.given()) || (expq->parsed() && !exp_lambda.given())) {
        std::cerr << "error: one of --lambda or --lambda-times-d is required\n";
        return 2;
    }

    if (gen->parsed()) {
        if (!gen_k_given) gspec.k_true = gspec.d / 2;
        gspec.x_distribution = parse_dist(gen_dist);
        SyntheticResult res = generate_synthetic(gspec);
        write_csv_file(gen_output, res.dataset);
        write_sidecar(sidecar_path(gen_output), gspec, res);
        std::cerr << "seed: " << gspec.seed << '\n';
        std::cerr << "wrote " << gen_output << " and " << sidecar_path(gen_output) << '\n';
        return 0;
    }

    if (fitc->parsed()) {
        Dataset ds = load_csv(fit_csv, fit_target, fit_center);
        fopt.lambda = fit_lambda.resolve(ds.x.cols());
        fopt.solver = solver_from_name(fit_solver);
        std::optional<TestSet> test;
        if (!fit_test.empty())
            test = apply_transform(ds, read_csv_file(fit_test), fit_target);
        if (fopt.solver == Solver::sa)
            std::cerr << "seed: " << fopt.schedule.seed << '\n';
        FitReport report = fit(ds.x, ds.y, fopt, test ? &*test : nullptr);
        if (fit_format == "json")
            std::cout << fit_report_to_json(report, fit_timings);
        else if (fit_format == "csv")
            print_fit_csv(std::cout, report, fit_timings);
        else if (fit_format == "table")
            print_fit_table(std::cout, report, fit_timings);
        else
            throw invalid_input("unknown format: '" + fit_format + "'");
        return 0;
    }

    if (sweep->parsed()) {
        espec.x_distribution = parse_dist(sweep_dist);
        if (sweep_full) espec.n = 3000;
        std::cerr << "seed: " << espec.seed << '\n';
        auto rows = run_synthetic_sweep(espec);
        if (sweep_format == "csv")
            write_sweep_csv(std::cout, rows, sweep_timings);
        else if (sweep_format == "json")
            write_sweep_json(std::cout, espec, rows, sweep_timings);
        else if (sweep_format == "table")
            write_sweep_table(std::cout, rows, sweep_timings);
        else
            throw invalid_input("unknown format: '" + sweep_format + "'");
        return 0;
    }

    if (diab->parsed()) {
        Dataset ds = load_csv(diab_csv, "", diab_center);
        std::cerr << "seed: " << diab_seed << '\n';
        auto rows = run_lambda_grid(ds, diab_lambdas, diab_reads, diab_sweeps, diab_seed,
                                    diab_threads);
        if (diab_format == "csv")
            write_lambda_grid_csv(std::cout, rows, diab_timings);
        else if (diab_format == "table")
            write_lambda_grid_table(std::cout, rows, diab_timings);
        else
            throw invalid_input("unknown format: '" + diab_format + "'");
        return 0;
    }

    if (expq->parsed()) {
        Dataset ds = load_csv(exp_csv, exp_target, exp_center);
        double lambda = exp_lambda.resolve(ds.x.cols());
        double alpha = exp_alpha ? *exp_alpha : default_alpha(ds.x.cols());
        GramSummary g = gram_summary(ds.x, ds.y, alpha);
        MultilinearPoly poly = compile_objective(g, ds.x, ds.y, lambda);
        std::string text;
        if (exp_format == "poly") {
            text = poly_to_json(poly);
        } else if (exp_format == "qubo") {
            QuboModel q = quadratize(poly, exp_penalty);
            text = qubo_to_string(q);
        } else {
            throw invalid_input("unknown format: '" + exp_format + "'");
        }
        if (exp_output.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(exp_output);
            if (!out) throw invalid_input("cannot open file for writing: " + exp_output);
            out << text;
            std::cerr << "wrote " << exp_output << '\n';
        }
        return 0;
    }

    if (solq->parsed()) {
        std::ifstream in(sol_path);
        if (!in) throw invalid_input("cannot open file: " + sol_path);
        QuboModel q = read_qubo(in);
        SampleSet ss;
        if (sol_method == "sa") {
            std::cerr << "seed: " << sol_sched.seed << '\n';
            ss = simulated_anneal(q, sol_sched, sol_threads);
        } else if (sol_method == "enumerate") {
            ss = enumerate_qubo(q);
        } else {
            throw invalid_input("unknown method: '" + sol_method + "'");
        }
        std::cout << sample_set_to_json(ss);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

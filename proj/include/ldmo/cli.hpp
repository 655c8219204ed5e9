#ifndef LDMO_CLI_HPP
#define LDMO_CLI_HPP

#include "engine.hpp"
#include "objective.hpp"
#include "report_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ldmo::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, usage_error = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by parse_args for --help; what() is the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string function;
    std::size_t dim = 2;
    std::optional<double> lower;
    std::optional<double> upper;
    Config search;
    std::size_t repetitions = 10;
    VerifyParams verify;
    std::filesystem::path output_dir = "out";
    bool emit_plot = false;
    std::size_t plot_grid = 200;
    unsigned threads = 1;

    std::optional<Bounds> bounds_override() const
    {
        if (lower && upper) {
            return Bounds::uniform(dim, *lower, *upper);
        }
        return std::nullopt;
    }

    ObjectiveSpec objective() const { return make_benchmark(function, dim, bounds_override()); }
};

/// Per-function defaults for flags the user did not give.
inline double default_sigma(const std::string& function) { return function == "griewank" ? 0.1 : 0.9; }

inline ExperimentConfig parse_args(const std::vector<std::string>& args)
{
    ExperimentConfig cfg;
    std::optional<double> sigma;
    std::optional<double> cluster_tol;
    bool no_cross = false;

    CLI::App app{"Multimodal optimization by line-distance maximization", "ldmo"};
    app.add_option("--function", cfg.function, "Benchmark: rastrigin or griewank")
        ->required()
        ->check(CLI::IsMember({"rastrigin", "griewank"}));
    app.add_option("--dim", cfg.dim, "Decision-space dimension")->check(CLI::PositiveNumber);
    app.add_option("--m", cfg.search.m, "Line searches per solution and iteration")->check(CLI::PositiveNumber);
    app.add_option("--sigma", sigma, "Acceptance/suppression radius (default 0.9 rastrigin, 0.1 griewank)");
    app.add_option("--iterations", cfg.search.iterations, "Iterations per repetition")->check(CLI::PositiveNumber);
    app.add_option("--repetitions", cfg.repetitions, "Independent repetitions")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.search.seed, "Seed of repetition 0; repetition k uses seed + k");
    app.add_option("--lower", cfg.lower, "Uniform lower bound override");
    app.add_option("--upper", cfg.upper, "Uniform upper bound override");
    app.add_option("--scan-points", cfg.search.linesearch.scan_points, "Coarse scan points per line search")
        ->check(CLI::Range(std::size_t{3}, std::numeric_limits<std::size_t>::max()));
    app.add_option("--refine-iters", cfg.search.linesearch.refine_iters, "Golden-section iterations per line search")
        ->check(CLI::PositiveNumber);
    app.add_option("--pop-cap", cfg.search.pop_cap, "Maximum active population size")->check(CLI::PositiveNumber);
    app.add_flag("--no-cross-suppression", no_cross, "Do not suppress active solutions near archived ones");
    app.add_option("--cluster-tol", cluster_tol, "Distance below which verified optima count as one");
    app.add_option("--output", cfg.output_dir, "Output directory");
    app.add_flag("--plot", cfg.emit_plot, "Write plot_rep<k>.svg per repetition (2-D only)");
    app.add_option("--plot-grid", cfg.plot_grid, "Heatmap resolution")
        ->check(CLI::Range(std::size_t{16}, std::size_t{4096}));
    app.add_option("--threads", cfg.threads, "Worker threads for repetitions")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    cfg.search.sigma = sigma.value_or(default_sigma(cfg.function));
    if (!(cfg.search.sigma > 0.0)) {
        throw UsageError("--sigma must be positive");
    }
    if (cluster_tol) {
        if (!(*cluster_tol > 0.0)) {
            throw UsageError("--cluster-tol must be positive");
        }
        cfg.verify.cluster_tol = *cluster_tol;
    }
    cfg.search.cross_suppression = !no_cross;
    if (cfg.lower.has_value() != cfg.upper.has_value()) {
        throw UsageError("--lower and --upper must be given together");
    }
    if (cfg.lower && !(*cfg.lower < *cfg.upper)) {
        throw UsageError("--lower must be below --upper");
    }
    return cfg;
}

/// Runs every repetition and writes solutions.csv, summary.json and optional
/// plots into the output directory. Prints one line per repetition to `out`.
inline int run_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err)
{
    ObjectiveSpec spec = [&] {
        try {
            return cfg.objective();
        } catch (const ConfigError& e) {
            throw UsageError(e.what());
        }
    }();
    try {
        cfg.search.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
        err << "ldmo: cannot create output directory " << cfg.output_dir << '\n';
        return runtime_failure;
    }

    const std::vector<RunReport> reports =
        run_repetitions(cfg.search, spec, cfg.repetitions, cfg.verify, cfg.threads);
    for (const RunReport& r : reports) {
        out << "rep " << r.repetition << ": lp=" << r.final_archive.size()
            << " distinct_optima=" << r.distinct_optima
            << " global_found=" << (r.global_found ? "true" : "false")
            << " evals=" << r.eval_count << '\n';
    }

    try {
        write_csv(reports, spec.dim(), cfg.output_dir / "solutions.csv");
        const SummaryHeader header{spec.name(), spec.dim(), cfg.search.m, cfg.search.sigma,
                                   cfg.search.iterations, cfg.repetitions, cfg.search.seed, spec.bounds()};
        write_json_summary(reports, header, cfg.output_dir / "summary.json");
        if (cfg.emit_plot) {
            if (spec.dim() != 2) {
                err << "ldmo: warning: --plot needs a 2-D objective, skipping plots\n";
            } else {
                for (const RunReport& r : reports) {
                    emit_plot(r, spec, cfg.output_dir / ("plot_rep" + std::to_string(r.repetition) + ".svg"),
                              cfg.plot_grid);
                }
            }
        }
    } catch (const IoError& e) {
        err << "ldmo: " << e.what() << '\n';
        return runtime_failure;
    }
    return ok;
}

/// Entry point shared by the executable and the tests.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return run_experiment(parse_args(args), out, err);
    } catch (const HelpRequested& h) {
        out << h.what();
        return ok;
    } catch (const UsageError& e) {
        err << "ldmo: " << e.what() << "\nRun with --help for usage.\n";
        return usage_error;
    } catch (const std::exception& e) {
        err << "ldmo: " << e.what() << '\n';
        return runtime_failure;
    }
}

} // namespace ldmo::cli

#endif

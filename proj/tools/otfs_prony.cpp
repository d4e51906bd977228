// otfs-prony: seeded experiment driver for the two-stage Prony estimator.
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <otfsprony/errors.hpp>
#include <otfsprony/experiment.hpp>

namespace
{

enum ExitCode : int
{
    exit_ok      = 0,
    exit_invalid = 1,
    exit_io      = 3,
    exit_other   = 4
};

struct CommonArgs
{
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string out;
    std::string format = "csv";
    unsigned threads   = 0;
    bool no_plots      = false;
};

void add_common(CLI::App* sub, CommonArgs& args)
{
    sub->add_option("--spec", args.spec, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "Master seed, overrides the scenario");
    sub->add_option("--out", args.out, "Output directory, overrides the scenario");
    sub->add_option("--trials", args.trials, "Monte-Carlo trials, overrides the scenario");
    sub->add_option("--format", args.format, "Table format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", args.threads, "Worker threads (0: all cores)");
    sub->add_flag("--no-plots", args.no_plots, "Skip SVG plot files");
}

std::string joined(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i)
    {
        if (i > 0)
        {
            s += ' ';
        }
        s += argv[i];
    }
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-stage Prony delay-Doppler estimation experiments"};
    app.set_version_flag("--version", otfsprony::library_version());
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* sweep = app.add_subcommand("residual-sweep", "Stage-1 residual versus model order");
    CLI::App* estimate = app.add_subcommand("estimate", "Full path estimation and scoring");
    CLI::App* order = app.add_subcommand("order-select", "AIC, BIC and heuristic order choices");
    for (CLI::App* sub : {sweep, estimate, order})
    {
        add_common(sub, args);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }

    try
    {
        otfsprony::ExperimentSpec spec = otfsprony::load_experiment_spec(args.spec);
        if (args.seed)
        {
            spec.seed = *args.seed;
        }
        if (args.trials)
        {
            spec.trials = *args.trials;
        }
        if (args.no_plots)
        {
            spec.plots = false;
        }
        spec.validate();

        otfsprony::RunOptions options;
        options.out_dir      = args.out;
        options.format       = otfsprony::parse_output_format(args.format);
        options.threads      = args.threads;
        options.command_line = joined(argc, argv);

        otfsprony::RunSummary summary;
        if (sweep->parsed())
        {
            summary = otfsprony::run_residual_sweep(spec, options);
        }
        else if (estimate->parsed())
        {
            summary = otfsprony::run_estimation(spec, options);
        }
        else
        {
            summary = otfsprony::run_order_selection(spec, options);
        }
        std::cout << "wrote " << summary.files.size() << " files to "
                  << summary.out_dir.string() << '\n';
        return exit_ok;
    }
    catch (const otfsprony::IoError& e)
    {
        std::cerr << "otfs-prony: I/O error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "otfs-prony: invalid input: " << e.what() << '\n';
        return exit_invalid;
    }
    catch (const std::exception& e)
    {
        std::cerr << "otfs-prony: error: " << e.what() << '\n';
        return exit_other;
    }
}

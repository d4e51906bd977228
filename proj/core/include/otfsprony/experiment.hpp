///
/// \file experiment.hpp
///
/// Seeded Monte-Carlo experiment driver behind the `otfs-prony` tool.
///
/// An experiment is described by a JSON scenario file (see README.md for the
/// schema). Every trial draws its channel from `trial_seed(master, i)` and its
/// noise for the j-th SNR entry from `noise_seed(trial_seed, j)`, so a run is
/// reproducible from the scenario and master seed alone, independent of the
/// number of worker threads.
///
#ifndef OTFSPRONY_EXPERIMENT_HPP
#define OTFSPRONY_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <otfsprony/channel.hpp>
#include <otfsprony/evaluation.hpp>
#include <otfsprony/pipeline.hpp>

namespace otfsprony
{

/// Library version string, e.g. "0.1.0".
std::string library_version();

struct GridSpec
{
    std::size_t repetitions = 16; ///< N
    std::size_t subchannels = 16; ///< M
    double slot_duration    = 1e-6;

    PilotConfig config() const
    {
        return PilotConfig(repetitions, subchannels, slot_duration);
    }

    bool operator==(const GridSpec&) const = default;
};

struct ChannelLaw
{
    std::size_t paths    = 5;
    double delay_range   = 1.0; ///< fraction of T
    double doppler_range = 1.0; ///< fraction of 1 / (2T)
    GainLaw gain_law     = GainLaw::complex_gaussian;

    bool operator==(const ChannelLaw&) const = default;
};

struct ExperimentSpec
{
    std::string name = "experiment";
    GridSpec grid;
    ChannelLaw channel;
    std::vector<std::optional<double>> snr_db{std::nullopt}; ///< nullopt: noiseless

    std::optional<std::size_t> p_hat; ///< fixed order for `estimate`
    OrderStrategy strategy = OrderStrategy::heuristic;
    std::size_t p_hat_init = 0;
    SampleSize sample_size = SampleSize::repetitions;
    double prune_threshold = 0.1;
    PronyMode mode         = PronyMode::constrained;
    std::size_t delays_per_doppler = 1;

    std::optional<std::size_t> p_hat_max; ///< residual sweep range, default N-1
    double match_radius = default_match_radius;

    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    bool plots = true;

    /// \throws InvalidArgument when some module precondition cannot hold.
    void validate() const;

    EstimatorOptions estimator_options() const;

    bool operator==(const ExperimentSpec&) const = default;
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);

/// \throws IoError if the file cannot be read.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Canonical JSON rendering; parse_experiment_spec(to_json(s)) == s.
std::string to_json(const ExperimentSpec& spec);

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);
std::uint64_t noise_seed(std::uint64_t trial_seed, std::size_t snr_index);

/// Channel draw and received grid for one (trial, SNR) cell.
struct TrialInput
{
    std::size_t trial     = 0;
    std::size_t snr_index = 0;
    std::uint64_t seed    = 0; ///< trial seed
    ChannelSpec channel;
    ReceivedGrid grid;
};

TrialInput make_trial(const ExperimentSpec& spec, std::size_t trial,
                      std::size_t snr_index);

enum class OutputFormat
{
    csv,
    json
};

OutputFormat parse_output_format(const std::string& name);

struct RunOptions
{
    std::filesystem::path out_dir;
    OutputFormat format  = OutputFormat::csv;
    unsigned threads     = 0; ///< 0: hardware concurrency
    std::string command_line;
};

struct RunSummary
{
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> files; ///< relative to out_dir, sorted
};

RunSummary run_residual_sweep(const ExperimentSpec& spec, const RunOptions& options);
RunSummary run_estimation(const ExperimentSpec& spec, const RunOptions& options);
RunSummary run_order_selection(const ExperimentSpec& spec, const RunOptions& options);

} // namespace otfsprony

#endif

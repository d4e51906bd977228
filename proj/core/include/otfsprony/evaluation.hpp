///
/// \file evaluation.hpp
///
/// Scoring of estimated paths against ground truth on the DD grid.
///
/// Distances are measured in grid bins: delay in units of T_s and Doppler in
/// units of 1 / (N T). Both coordinates are compared modulo their period
/// (T and 1 / T), since the received grid cannot tell the aliases apart.
///
#ifndef OTFSPRONY_EVALUATION_HPP
#define OTFSPRONY_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <otfsprony/channel.hpp>
#include <otfsprony/pipeline.hpp>

namespace otfsprony
{

inline constexpr double default_match_radius = 0.5;

struct MatchedPair
{
    std::size_t truth;
    std::size_t estimate;
    double delay_error;   ///< seconds, estimate - truth, wrapped
    double doppler_error; ///< Hz, estimate - truth, wrapped
    double distance;      ///< bins
};

struct MatchResult
{
    std::vector<MatchedPair> pairs; ///< ordered by truth index
    std::vector<std::size_t> misses;
    std::vector<std::size_t> ghosts;
};

/// Wrapped DD distance in bins between a true path and an estimate.
double dd_distance(const PathParams& truth, const PathEstimate& estimate,
                   const PilotConfig& cfg);

///
/// Assignment with the largest number of pairs within `radius`, and among
/// those the smallest total distance. Solved exactly with the Hungarian
/// method.
///
MatchResult match_paths(std::span<const PathParams> truth,
                        std::span<const PathEstimate> estimates,
                        const PilotConfig& cfg,
                        double radius = default_match_radius);

///
/// Rectangular assignment: minimum-cost assignment of every row to a distinct
/// column (rows <= cols). Returns the column chosen for each row.
///
std::vector<std::size_t> hungarian_assignment(
    const std::vector<std::vector<double>>& cost);

struct MetricsRow
{
    std::string scenario;
    std::uint64_t seed      = 0;
    std::size_t true_paths  = 0;
    std::size_t p_hat       = 0; ///< number of estimated paths
    double rmse_delay       = 0; ///< T_s units, matched pairs only (NaN if none)
    double rmse_doppler     = 0; ///< 1/(N T) units, matched pairs only
    double detection_rate   = 0; ///< matched / P
    double ghost_rate       = 0; ///< ghosts / max(p_hat, 1)
};

MetricsRow score(std::span<const PathParams> truth,
                 const EstimationReport& report, const PilotConfig& cfg,
                 double radius = default_match_radius,
                 std::string scenario = {}, std::uint64_t seed = 0);

} // namespace otfsprony

#endif

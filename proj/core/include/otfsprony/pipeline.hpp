///
/// \file pipeline.hpp
///
/// End-to-end delay/Doppler/gain estimation from one received grid.
///
#ifndef OTFSPRONY_PIPELINE_HPP
#define OTFSPRONY_PIPELINE_HPP

#include <optional>
#include <vector>

#include <otfsprony/estimator.hpp>
#include <otfsprony/order_select.hpp>

namespace otfsprony
{

struct PathEstimate
{
    Complex gain;
    double delay;      ///< seconds, [0, T)
    double doppler;    ///< Hz
    double row_energy; ///< ||V~_p||^2 of the Doppler component it came from
};

struct PrunedRow
{
    std::size_t index; ///< index of its root in EstimationReport::dopplers
    double energy;
    double doppler;
};

struct EstimatorOptions
{
    /// Fixed Stage-1 order; empty selects it with `strategy`.
    std::optional<std::size_t> p_hat;
    OrderStrategy strategy = OrderStrategy::heuristic;
    std::size_t p_hat_init = 0; ///< heuristic start order, 0 = default
    std::optional<std::size_t> expected_paths;
    SampleSize sample_size         = SampleSize::repetitions;
    std::size_t delays_per_doppler = 1; ///< L
    double prune_threshold         = 0.1;
    PronyMode mode                 = PronyMode::constrained;
};

struct EstimationReport
{
    std::vector<PathEstimate> paths; ///< sorted by descending row_energy
    std::size_t p_hat        = 0;    ///< selected order (Doppler components)
    std::size_t stage1_order = 0;    ///< order of the Stage-1 system solved
    double stage1_rss        = 0;    ///< unit-norm RSS at stage1_order
    OrderTrace order_trace;
    std::vector<PrunedRow> pruned_rows;
    DopplerSet dopplers;             ///< raw Stage-1 output
    double doppler_condition = 1;

    bool empty() const noexcept
    {
        return paths.empty();
    }
};

EstimationReport estimate_full(const ReceivedGrid& grid,
                               const EstimatorOptions& options = {});

} // namespace otfsprony

#endif

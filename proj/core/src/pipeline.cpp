#include <otfsprony/pipeline.hpp>

#include <algorithm>
#include <string>

namespace otfsprony
{
namespace
{

struct Prepared
{
    std::vector<double> dopplers;  ///< Dopplers handed to compensation
    std::vector<std::size_t> root; ///< their index in report.dopplers
};

Prepared reliable_subset(const DopplerSet& set)
{
    Prepared out;
    for (const std::size_t idx : set.reliable())
    {
        out.dopplers.push_back(set.values[idx]);
        out.root.push_back(idx);
    }
    return out;
}

} // namespace

EstimationReport estimate_full(const ReceivedGrid& grid,
                               const EstimatorOptions& options)
{
    const PilotConfig& cfg = grid.config;
    const std::size_t n    = cfg.repetitions();
    const std::size_t m    = cfg.subchannels();
    if (options.delays_per_doppler < 1 || options.delays_per_doppler > m / 2 - 1)
    {
        throw InvalidArgument("estimate_full: L must lie in [1, M/2 - 1]");
    }
    if (options.p_hat && (*options.p_hat < 1 || *options.p_hat > n - 1))
    {
        throw InvalidArgument("estimate_full: p_hat must lie in [1, N-1]");
    }
    if (!(options.prune_threshold >= 0.0 && options.prune_threshold <= 1.0))
    {
        throw InvalidArgument("estimate_full: prune threshold must lie in [0, 1]");
    }

    EstimationReport report;
    if (grid.samples.squaredNorm() == 0.0)
    {
        report.order_trace = rss_curve(grid, n - 1, options.sample_size);
        return report;
    }

    Prepared prepared;
    if (options.p_hat)
    {
        report.order_trace  = rss_curve(grid, n - 1, options.sample_size);
        report.order_trace.chosen = *options.p_hat;
        report.p_hat        = *options.p_hat;
        report.stage1_order = *options.p_hat;
        report.dopplers     = stage1_doppler(grid, *options.p_hat, options.mode);
        prepared            = reliable_subset(report.dopplers);
    }
    else
    {
        OrderRequest request;
        request.strategy        = options.strategy;
        request.p_hat_init      = options.p_hat_init;
        request.expected_paths  = options.expected_paths;
        request.prune_threshold = options.prune_threshold;
        request.mode            = options.mode;
        request.sample_size     = options.sample_size;
        OrderSelection selection = select_order(grid, request);
        report.order_trace = std::move(selection.trace);
        report.p_hat       = selection.p_hat;
        if (selection.heuristic)
        {
            const HeuristicOutcome& h = *selection.heuristic;
            report.dopplers     = h.initial;
            report.stage1_order = h.initial.p_hat;
            std::size_t next    = 0;
            for (std::size_t row = 0; row < h.used.size(); ++row)
            {
                if (next < h.survivors.size() && h.survivors[next] == row)
                {
                    prepared.dopplers.push_back(h.initial.values[h.used[row]]);
                    prepared.root.push_back(h.used[row]);
                    ++next;
                }
                else
                {
                    report.pruned_rows.push_back(
                        {h.used[row], h.energies[static_cast<Index>(row)],
                         h.initial.values[h.used[row]]});
                }
            }
        }
        else
        {
            report.stage1_order = selection.p_hat;
            report.dopplers = stage1_doppler(grid, selection.p_hat, options.mode);
            prepared        = reliable_subset(report.dopplers);
        }
    }
    report.stage1_rss =
        report.order_trace.records.at(report.stage1_order - 1).rss;

    if (prepared.dopplers.empty())
    {
        return report;
    }

    const Compensation comp = doppler_compensate(grid, prepared.dopplers);
    report.doppler_condition = comp.condition;
    const RealVector energies = row_energies(comp.v_tilde);
    const std::vector<std::size_t> survivors =
        heuristic_prune(comp.v_tilde, options.prune_threshold);

    std::size_t next = 0;
    const double slot = cfg.slot_duration();
    for (std::size_t row = 0; row < prepared.dopplers.size(); ++row)
    {
        const double energy = energies[static_cast<Index>(row)];
        if (next >= survivors.size() || survivors[next] != row)
        {
            report.pruned_rows.push_back(
                {prepared.root[row], energy, prepared.dopplers[row]});
            continue;
        }
        ++next;
        const DelaySpectrum spectrum =
            delay_spectrum(comp.v_tilde.row(static_cast<Index>(row)).transpose());
        const std::vector<DelayRoot> roots =
            stage2_delay(spectrum, options.delays_per_doppler, slot, options.mode);
        std::vector<double> delays;
        for (const auto& r : roots)
        {
            delays.push_back(r.delay);
        }
        const std::vector<Complex> gains =
            estimate_amplitudes(spectrum, delays, slot);
        for (std::size_t q = 0; q < roots.size(); ++q)
        {
            report.paths.push_back(
                {gains[q], roots[q].delay, prepared.dopplers[row], energy});
        }
    }
    std::stable_sort(report.paths.begin(), report.paths.end(),
                     [](const PathEstimate& a, const PathEstimate& b) {
                         return a.row_energy > b.row_energy;
                     });
    return report;
}

} // namespace otfsprony

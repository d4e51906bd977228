#include <otfsprony/order_select.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace otfsprony
{
namespace
{

std::size_t argmin_by(const std::vector<OrderRecord>& records,
                      double OrderRecord::*score)
{
    if (records.empty())
    {
        return 0;
    }
    const auto best = std::min_element(
        records.begin(), records.end(),
        [score](const OrderRecord& a, const OrderRecord& b) {
            return a.*score < b.*score;
        });
    return best->p_hat;
}

double information_fit(double rss, double n)
{
    return n * std::log(std::max(rss, rss_floor) / n);
}

} // namespace

std::string_view to_string(OrderStrategy s)
{
    switch (s)
    {
    case OrderStrategy::aic:
        return "aic";
    case OrderStrategy::bic:
        return "bic";
    case OrderStrategy::heuristic:
        return "heuristic";
    }
    return "unknown";
}

OrderStrategy parse_order_strategy(std::string_view name)
{
    if (name == "aic")
    {
        return OrderStrategy::aic;
    }
    if (name == "bic")
    {
        return OrderStrategy::bic;
    }
    if (name == "heuristic")
    {
        return OrderStrategy::heuristic;
    }
    throw InvalidArgument("unknown order strategy '" + std::string(name) + "'");
}

double aic(std::size_t p_hat, double rss, double sample_size)
{
    return 2.0 * (3.0 * static_cast<double>(p_hat)) +
           information_fit(rss, sample_size);
}

double bic(std::size_t p_hat, double rss, double sample_size)
{
    return (3.0 * static_cast<double>(p_hat)) * std::log(sample_size) +
           information_fit(rss, sample_size);
}

std::size_t OrderTrace::argmin_aic() const
{
    return argmin_by(records, &OrderRecord::aic);
}

std::size_t OrderTrace::argmin_bic() const
{
    return argmin_by(records, &OrderRecord::bic);
}

OrderTrace rss_curve(const ReceivedGrid& grid, std::size_t p_hat_max,
                     SampleSize sample_size)
{
    const std::size_t n = grid.config.repetitions();
    if (p_hat_max < 1 || p_hat_max > n - 1)
    {
        throw InvalidArgument("rss_curve: p_hat_max must lie in [1, N-1]");
    }
    OrderTrace trace;
    trace.records.reserve(p_hat_max);
    for (std::size_t p = 1; p <= p_hat_max; ++p)
    {
        const ComplexMatrix t = stacked_toeplitz(grid, p);
        const NullVector nv   = min_norm_null_vector(t);
        const double samples  = sample_size == SampleSize::repetitions
                                    ? static_cast<double>(n)
                                    : static_cast<double>(t.rows());
        OrderRecord rec;
        rec.p_hat     = p;
        rec.rss       = nv.rss;
        rec.t_norm_sq = t.squaredNorm();
        const double scored = std::max(nv.rss, relative_rss_floor * rec.t_norm_sq);
        rec.aic       = aic(p, scored, samples);
        rec.bic       = bic(p, scored, samples);
        trace.records.push_back(rec);
    }
    return trace;
}

RealVector row_energies(const ComplexMatrix& m)
{
    return m.rowwise().squaredNorm();
}

std::vector<std::size_t> heuristic_prune(const ComplexMatrix& v_tilde,
                                         double threshold)
{
    std::vector<std::size_t> keep;
    if (v_tilde.rows() == 0)
    {
        return keep;
    }
    const RealVector energy = row_energies(v_tilde);
    const double cutoff     = threshold * energy.maxCoeff();
    for (Index p = 0; p < energy.size(); ++p)
    {
        if (energy[p] >= cutoff)
        {
            keep.push_back(static_cast<std::size_t>(p));
        }
    }
    return keep;
}

std::size_t default_initial_order(std::size_t repetitions,
                                  std::optional<std::size_t> expected_paths)
{
    const std::size_t cap = repetitions - 1;
    if (!expected_paths || *expected_paths == 0)
    {
        return cap;
    }
    return std::min(cap, 2 * *expected_paths);
}

OrderSelection select_order(const ReceivedGrid& grid, const OrderRequest& request)
{
    const std::size_t n = grid.config.repetitions();
    OrderSelection out;
    out.trace          = rss_curve(grid, n - 1, request.sample_size);
    out.trace.strategy = request.strategy;

    switch (request.strategy)
    {
    case OrderStrategy::aic:
        out.p_hat = out.trace.argmin_aic();
        break;
    case OrderStrategy::bic:
        out.p_hat = out.trace.argmin_bic();
        break;
    case OrderStrategy::heuristic:
    {
        const std::size_t p_init =
            request.p_hat_init != 0
                ? request.p_hat_init
                : default_initial_order(n, request.expected_paths);
        if (p_init > n - 1)
        {
            throw InvalidArgument("heuristic initial order exceeds N-1");
        }
        HeuristicOutcome h;
        h.initial = stage1_doppler(grid, p_init, request.mode);
        h.used    = h.initial.reliable();
        std::vector<double> values;
        for (const std::size_t idx : h.used)
        {
            values.push_back(h.initial.values[idx]);
        }
        h.compensation = doppler_compensate(grid, values);
        h.energies     = row_energies(h.compensation.v_tilde);
        h.survivors = heuristic_prune(h.compensation.v_tilde, request.prune_threshold);
        for (const std::size_t row : h.survivors)
        {
            h.survivor_dopplers.push_back(values[row]);
        }
        out.p_hat = h.survivors.size();
        out.heuristic = std::move(h);
        break;
    }
    }
    out.trace.chosen = out.p_hat;
    return out;
}

} // namespace otfsprony

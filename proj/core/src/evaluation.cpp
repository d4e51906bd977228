#include <otfsprony/evaluation.hpp>

#include <cmath>
#include <limits>

namespace otfsprony
{
namespace
{

// x mod period, folded into [-period/2, period/2)
double wrap_centered(double x, double period)
{
    double r = std::fmod(x + 0.5 * period, period);
    if (r < 0.0)
    {
        r += period;
    }
    return r - 0.5 * period;
}

double delay_error(const PathParams& truth, const PathEstimate& est,
                   const PilotConfig& cfg)
{
    return wrap_centered(est.delay - truth.delay, cfg.slot_duration());
}

double doppler_error(const PathParams& truth, const PathEstimate& est,
                     const PilotConfig& cfg)
{
    return wrap_centered(est.doppler - truth.doppler, 1.0 / cfg.slot_duration());
}

} // namespace

double dd_distance(const PathParams& truth, const PathEstimate& estimate,
                   const PilotConfig& cfg)
{
    const double dt = delay_error(truth, estimate, cfg) / cfg.sampling_interval();
    const double df = doppler_error(truth, estimate, cfg) / cfg.doppler_bin();
    return std::hypot(dt, df);
}

std::vector<std::size_t> hungarian_assignment(
    const std::vector<std::vector<double>>& cost)
{
    const std::size_t n = cost.size();
    if (n == 0)
    {
        return {};
    }
    const std::size_t m = cost.front().size();
    if (m < n)
    {
        throw InvalidArgument("hungarian_assignment: more rows than columns");
    }
    const double inf = std::numeric_limits<double>::infinity();
    // Potentials u (rows), v (cols); way/p use 1-based columns, 0 = virtual.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i)
    {
        p[0]           = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do
        {
            used[j0]           = 1;
            const std::size_t i0 = p[j0];
            double delta       = inf;
            std::size_t j1     = 0;
            for (std::size_t j = 1; j <= m; ++j)
            {
                if (used[j])
                {
                    continue;
                }
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j]  = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1    = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j)
            {
                if (used[j])
                {
                    u[p[j]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do
        {
            const std::size_t j1 = way[j0];
            p[j0]                = p[j1];
            j0                   = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
    {
        if (p[j] != 0)
        {
            assignment[p[j] - 1] = j - 1;
        }
    }
    return assignment;
}

MatchResult match_paths(std::span<const PathParams> truth,
                        std::span<const PathEstimate> estimates,
                        const PilotConfig& cfg, double radius)
{
    if (!(radius > 0.0))
    {
        throw InvalidArgument("match_paths: radius must be positive");
    }
    const std::size_t n_true = truth.size();
    const std::size_t n_est  = estimates.size();
    MatchResult out;

    // Each true path may take an estimate or its own "unmatched" column.
    // Admissible pairs cost d - big, so that one extra pair always outweighs
    // any difference in total distance.
    const double big = (static_cast<double>(n_true) + 1.0) * radius + 1.0;
    std::vector<std::vector<double>> cost(
        n_true, std::vector<double>(n_est + n_true, 0.0));
    std::vector<std::vector<double>> dist(n_true, std::vector<double>(n_est));
    for (std::size_t i = 0; i < n_true; ++i)
    {
        for (std::size_t j = 0; j < n_est; ++j)
        {
            dist[i][j] = dd_distance(truth[i], estimates[j], cfg);
            if (dist[i][j] <= radius)
            {
                cost[i][j] = dist[i][j] - big;
            }
        }
    }
    const std::vector<std::size_t> assign = hungarian_assignment(cost);

    std::vector<char> taken(n_est, 0);
    for (std::size_t i = 0; i < n_true; ++i)
    {
        const std::size_t j = assign[i];
        if (j < n_est && dist[i][j] <= radius)
        {
            taken[j] = 1;
            out.pairs.push_back({i, j, delay_error(truth[i], estimates[j], cfg),
                                 doppler_error(truth[i], estimates[j], cfg),
                                 dist[i][j]});
        }
        else
        {
            out.misses.push_back(i);
        }
    }
    for (std::size_t j = 0; j < n_est; ++j)
    {
        if (!taken[j])
        {
            out.ghosts.push_back(j);
        }
    }
    return out;
}

MetricsRow score(std::span<const PathParams> truth,
                 const EstimationReport& report, const PilotConfig& cfg,
                 double radius, std::string scenario, std::uint64_t seed)
{
    const MatchResult match = match_paths(truth, report.paths, cfg, radius);
    MetricsRow row;
    row.scenario   = std::move(scenario);
    row.seed       = seed;
    row.true_paths = truth.size();
    row.p_hat      = report.paths.size();

    if (match.pairs.empty())
    {
        row.rmse_delay   = std::numeric_limits<double>::quiet_NaN();
        row.rmse_doppler = std::numeric_limits<double>::quiet_NaN();
    }
    else
    {
        double sum_dt = 0.0;
        double sum_df = 0.0;
        for (const auto& pair : match.pairs)
        {
            const double dt = pair.delay_error / cfg.sampling_interval();
            const double df = pair.doppler_error / cfg.doppler_bin();
            sum_dt += dt * dt;
            sum_df += df * df;
        }
        const double k   = static_cast<double>(match.pairs.size());
        row.rmse_delay   = std::sqrt(sum_dt / k);
        row.rmse_doppler = std::sqrt(sum_df / k);
    }
    row.detection_rate =
        truth.empty() ? 1.0
                      : static_cast<double>(match.pairs.size()) /
                            static_cast<double>(truth.size());
    row.ghost_rate = static_cast<double>(match.ghosts.size()) /
                     static_cast<double>(std::max<std::size_t>(row.p_hat, 1));
    return row;
}

} // namespace otfsprony

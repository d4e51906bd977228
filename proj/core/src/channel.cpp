#include <otfsprony/channel.hpp>

#include <cmath>
#include <string>

namespace otfsprony
{
namespace
{

// Uniform on the open interval (lo, hi).
double uniform_open(Rng& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    double x = dist(rng);
    while (x <= lo || x >= hi)
    {
        x = dist(rng);
    }
    return x;
}

} // namespace

GridOffsets grid_offsets(const PathParams& path, const PilotConfig& cfg)
{
    const double delay_bins   = path.delay / cfg.sampling_interval();
    const double doppler_bins = path.doppler / cfg.doppler_bin();
    const double delay_floor  = std::floor(delay_bins);
    const double doppler_near = std::round(doppler_bins);
    return {static_cast<long>(delay_floor), delay_bins - delay_floor,
            static_cast<long>(doppler_near), doppler_bins - doppler_near};
}

void validate_path(const PathParams& path, const PilotConfig& cfg)
{
    const double slot = cfg.slot_duration();
    if (!(path.delay > 0.0 && path.delay < slot))
    {
        throw InvalidArgument("path delay " + std::to_string(path.delay) +
                              " s outside (0, T)");
    }
    if (!(std::abs(path.doppler) < 0.5 / slot))
    {
        throw InvalidArgument("path Doppler " + std::to_string(path.doppler) +
                              " Hz outside (-1/(2T), 1/(2T))");
    }
    if (!std::isfinite(path.gain.real()) || !std::isfinite(path.gain.imag()))
    {
        throw InvalidArgument("path gain is not finite");
    }
}

std::vector<PathParams> draw_channel(Rng& rng, std::size_t count,
                                     const PilotConfig& cfg,
                                     double delay_range, double doppler_range,
                                     GainLaw law)
{
    if (count < 1)
    {
        throw InvalidArgument("draw_channel: need at least one path");
    }
    if (!(delay_range > 0.0 && delay_range <= 1.0) ||
        !(doppler_range > 0.0 && doppler_range <= 1.0))
    {
        throw InvalidArgument("draw_channel: ranges must lie in (0, 1]");
    }
    const double slot        = cfg.slot_duration();
    const double max_doppler = doppler_range / (2.0 * slot);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> phase(-pi, pi);

    std::vector<PathParams> paths;
    paths.reserve(count);
    for (std::size_t p = 0; p < count; ++p)
    {
        Complex gain;
        if (law == GainLaw::complex_gaussian)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            gain            = {re, im};
        }
        else
        {
            gain = std::polar(1.0, phase(rng));
        }
        const double delay   = uniform_open(rng, 0.0, delay_range * slot);
        const double doppler = uniform_open(rng, -max_doppler, max_doppler);
        paths.push_back({gain, delay, doppler});
    }
    return paths;
}

ComplexMatrix build_E(std::span<const double> dopplers, std::size_t repetitions,
                      double slot_duration)
{
    const Index n_rows = static_cast<Index>(repetitions);
    const Index n_cols = static_cast<Index>(dopplers.size());
    ComplexMatrix e(n_rows, n_cols);
    for (Index p = 0; p < n_cols; ++p)
    {
        const double cycles_per_slot = dopplers[static_cast<std::size_t>(p)] *
                                       slot_duration;
        for (Index n = 0; n < n_rows; ++n)
        {
            e(n, p) = std::polar(1.0, 2.0 * pi * cycles_per_slot *
                                          static_cast<double>(n));
        }
    }
    return e;
}

ComplexMatrix build_E(std::span<const PathParams> paths, const PilotConfig& cfg)
{
    std::vector<double> dopplers;
    dopplers.reserve(paths.size());
    for (const auto& path : paths)
    {
        dopplers.push_back(path.doppler);
    }
    return build_E(dopplers, cfg.repetitions(), cfg.slot_duration());
}

ComplexMatrix build_V(std::span<const PathParams> paths, const PilotConfig& cfg)
{
    const Index n_paths = static_cast<Index>(paths.size());
    const Index n_sub   = static_cast<Index>(cfg.subchannels());
    const double ts     = cfg.sampling_interval();
    const double slot   = cfg.slot_duration();
    ComplexMatrix v(n_paths, n_sub);
    for (Index p = 0; p < n_paths; ++p)
    {
        const PathParams& path = paths[static_cast<std::size_t>(p)];
        for (Index l = 0; l < n_sub; ++l)
        {
            const double x = static_cast<double>(l) / static_cast<double>(n_sub) -
                             path.delay / slot;
            v(p, l) = path.gain * dirichlet_kernel(x, cfg.subchannels()) *
                      std::polar(1.0, 2.0 * pi * path.doppler * ts *
                                          static_cast<double>(l));
        }
    }
    return v;
}

double noise_variance(double signal_power, double snr_db)
{
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

ReceivedGrid synthesize_received(const PilotConfig& cfg, const ChannelSpec& spec)
{
    for (const auto& path : spec.paths)
    {
        validate_path(path, cfg);
    }
    const Index n_rows = static_cast<Index>(cfg.repetitions());
    const Index n_cols = static_cast<Index>(cfg.subchannels());
    ComplexMatrix r = ComplexMatrix::Zero(n_rows, n_cols);
    if (!spec.paths.empty())
    {
        r = build_E(spec.paths, cfg) * build_V(spec.paths, cfg);
    }
    if (spec.snr_db)
    {
        if (!std::isfinite(*spec.snr_db))
        {
            throw InvalidArgument("synthesize_received: SNR must be finite");
        }
        const double power =
            r.squaredNorm() / static_cast<double>(cfg.samples());
        const double variance = noise_variance(power, *spec.snr_db);
        Rng rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
        for (Index l = 0; l < n_cols; ++l)
        {
            for (Index n = 0; n < n_rows; ++n)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                r(n, l) += Complex{re, im};
            }
        }
    }
    return {std::move(r), cfg};
}

ComplexMatrix synthesize_direct(const PilotConfig& cfg,
                                std::span<const PathParams> paths,
                                std::size_t guard_slots)
{
    const Index n_rows = static_cast<Index>(cfg.repetitions());
    const Index n_cols = static_cast<Index>(cfg.subchannels());
    const double ts    = cfg.sampling_interval();
    ComplexMatrix r    = ComplexMatrix::Zero(n_rows, n_cols);
    for (Index n = 0; n < n_rows; ++n)
    {
        for (Index l = 0; l < n_cols; ++l)
        {
            const double t = static_cast<double>(n * n_cols + l) * ts;
            Complex acc{0.0, 0.0};
            for (const auto& path : paths)
            {
                acc += path.gain * pilot_waveform(cfg, guard_slots, t - path.delay) *
                       std::polar(1.0, 2.0 * pi * path.doppler * t);
            }
            r(n, l) = acc;
        }
    }
    return r;
}

DDGrid dd_map(const ReceivedGrid& grid)
{
    DDGrid y(grid.samples.rows(), grid.samples.cols());
    for (Index l = 0; l < grid.samples.cols(); ++l)
    {
        y.col(l) = dft(grid.samples.col(l), DftDirection::forward);
    }
    return y;
}

} // namespace otfsprony

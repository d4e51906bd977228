#include <otfsprony/estimator.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace otfsprony
{
namespace
{

// arg in (-pi, pi]
double principal_arg(Complex z)
{
    const double a = std::arg(z);
    return a <= -pi ? a + 2.0 * pi : a;
}

// wrap into [0, 2 pi)
double wrap_positive(double angle)
{
    double a = std::fmod(angle, 2.0 * pi);
    if (a < 0.0)
    {
        a += 2.0 * pi;
    }
    return a >= 2.0 * pi ? 0.0 : a;
}

} // namespace

std::vector<std::size_t> DopplerSet::reliable() const
{
    std::vector<std::size_t> idx;
    for (std::size_t p = 0; p < values.size(); ++p)
    {
        if (!spurious[p])
        {
            idx.push_back(p);
        }
    }
    return idx;
}

ComplexMatrix stacked_toeplitz(const ReceivedGrid& grid, std::size_t p_hat)
{
    const Index n_rows = grid.samples.rows();
    const Index n_cols = grid.samples.cols();
    const Index order  = static_cast<Index>(p_hat);
    if (order < 1 || order > n_rows - 1)
    {
        throw InvalidArgument("stage 1 order " + std::to_string(p_hat) +
                              " outside [1, N-1] with N = " +
                              std::to_string(n_rows));
    }
    const Index block = n_rows - order;
    ComplexMatrix t(block * n_cols, order + 1);
    for (Index l = 0; l < n_cols; ++l)
    {
        const ComplexVector column = grid.samples.col(l);
        t.middleRows(l * block, block) =
            toeplitz_from_series(column, order, order);
    }
    return t;
}

DopplerSet stage1_doppler(const ReceivedGrid& grid, std::size_t p_hat,
                          PronyMode mode)
{
    const ComplexMatrix t      = stacked_toeplitz(grid, p_hat);
    const ComplexVector coeffs = prony_coefficients(t, mode);
    const double slot          = grid.config.slot_duration();

    DopplerSet out;
    out.p_hat = p_hat;
    out.roots = polynomial_roots(coeffs);
    for (const Complex z : out.roots)
    {
        const double radius = std::abs(z);
        out.values.push_back(principal_arg(z) / (2.0 * pi * slot));
        out.spurious.push_back(radius < 1.0 / spurious_root_radius ||
                               radius > spurious_root_radius);
    }
    return out;
}

Compensation doppler_compensate(const ReceivedGrid& grid,
                                std::span<const double> dopplers)
{
    const PilotConfig& cfg = grid.config;
    Compensation out;
    if (dopplers.empty())
    {
        out.v_hat    = ComplexMatrix(0, grid.samples.cols());
        out.v_tilde  = out.v_hat;
        out.residual = grid.samples.norm() > 0.0 ? 1.0 : 0.0;
        return out;
    }
    const ComplexMatrix e_hat =
        build_E(dopplers, cfg.repetitions(), cfg.slot_duration());
    out.condition = condition_number(e_hat);
    if (!(out.condition <= max_doppler_condition))
    {
        throw IllConditionedDopplerSet(out.condition);
    }
    out.v_hat   = least_squares(e_hat, grid.samples);
    out.v_tilde = out.v_hat;
    const double ts = cfg.sampling_interval();
    for (Index p = 0; p < out.v_tilde.rows(); ++p)
    {
        const double f = dopplers[static_cast<std::size_t>(p)];
        for (Index l = 0; l < out.v_tilde.cols(); ++l)
        {
            out.v_tilde(p, l) *=
                std::polar(1.0, -2.0 * pi * f * ts * static_cast<double>(l));
        }
    }
    const double r_norm = grid.samples.norm();
    out.residual =
        r_norm > 0.0 ? (grid.samples - e_hat * out.v_hat).norm() / r_norm : 0.0;
    return out;
}

Compensation doppler_compensate(const ReceivedGrid& grid,
                                const DopplerSet& dopplers)
{
    return doppler_compensate(grid, std::span<const double>(dopplers.values));
}

DelaySpectrum::DelaySpectrum(ComplexVector centered)
    : m_centered(std::move(centered))
{
    if (m_centered.size() < 2 || m_centered.size() % 2 != 0)
    {
        throw InvalidArgument("DelaySpectrum: length must be even and >= 2");
    }
}

Complex DelaySpectrum::at(int m) const
{
    if (m < min_index() || m > max_index())
    {
        throw InvalidArgument("DelaySpectrum: index " + std::to_string(m) +
                              " out of range");
    }
    return m_centered[m - min_index()];
}

ComplexVector DelaySpectrum::storage_order() const
{
    const Index n    = m_centered.size();
    const Index half = n / 2;
    ComplexVector out(n);
    // storage bin k holds centred index k (k < M/2) or k - M (k >= M/2)
    out.head(half) = m_centered.tail(half);
    out.tail(half) = m_centered.head(half);
    return out;
}

DelaySpectrum delay_spectrum(const ComplexVector& v_row)
{
    if (v_row.size() < 2 || v_row.size() % 2 != 0)
    {
        throw InvalidArgument("delay_spectrum: row length must be even and >= 2");
    }
    const ComplexVector bins = dft(v_row, DftDirection::forward);
    const Index half         = bins.size() / 2;
    ComplexVector centered(bins.size());
    centered.head(half) = bins.tail(half);
    centered.tail(half) = bins.head(half);
    return DelaySpectrum(std::move(centered));
}

std::vector<DelayRoot> stage2_delay(const DelaySpectrum& spectrum,
                                    std::size_t delays_per_doppler,
                                    double slot_duration, PronyMode mode,
                                    SpectrumIndexing indexing)
{
    const Index m = static_cast<Index>(spectrum.size());
    const Index l = static_cast<Index>(delays_per_doppler);
    if (l < 1 || l > m / 2 - 1)
    {
        throw InvalidArgument("stage 2 order " +
                              std::to_string(delays_per_doppler) +
                              " outside [1, M/2 - 1]");
    }
    const ComplexVector series = indexing == SpectrumIndexing::centered
                                     ? spectrum.centered()
                                     : spectrum.storage_order();
    // series[L + i - j] is Y[L - M/2 + i - j] on the centred index
    const ComplexMatrix t = toeplitz_from_series(series, l, l);
    const ComplexVector coeffs = prony_coefficients(t, mode);

    std::vector<DelayRoot> out;
    for (const Complex z : polynomial_roots(coeffs))
    {
        const double delay = wrap_positive(-std::arg(z)) / (2.0 * pi) *
                             slot_duration;
        out.push_back({delay < slot_duration ? delay : 0.0, z});
    }
    std::sort(out.begin(), out.end(),
              [](const DelayRoot& a, const DelayRoot& b) {
                  return a.delay < b.delay;
              });
    return out;
}

Complex estimate_amplitude(const DelaySpectrum& spectrum, double delay,
                           double slot_duration)
{
    const double m = static_cast<double>(spectrum.size());
    Complex acc{0.0, 0.0};
    for (int k = spectrum.min_index(); k <= spectrum.max_index(); ++k)
    {
        acc += spectrum.at(k) *
               std::polar(1.0, 2.0 * pi * k * delay / slot_duration);
    }
    return acc / (m * m);
}

std::vector<Complex> estimate_amplitudes(const DelaySpectrum& spectrum,
                                         std::span<const double> delays,
                                         double slot_duration)
{
    if (delays.size() == 1)
    {
        return {estimate_amplitude(spectrum, delays[0], slot_duration)};
    }
    const Index m = static_cast<Index>(spectrum.size());
    ComplexMatrix basis(m, static_cast<Index>(delays.size()));
    for (Index row = 0; row < m; ++row)
    {
        const int k = spectrum.min_index() + static_cast<int>(row);
        for (Index q = 0; q < basis.cols(); ++q)
        {
            basis(row, q) =
                static_cast<double>(m) *
                std::polar(1.0, -2.0 * pi * k *
                                    delays[static_cast<std::size_t>(q)] /
                                    slot_duration);
        }
    }
    const ComplexMatrix gains = least_squares(basis, spectrum.centered());
    return {gains.data(), gains.data() + gains.size()};
}

} // namespace otfsprony

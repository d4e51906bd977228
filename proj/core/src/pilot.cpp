#include <otfsprony/pilot.hpp>

#include <cmath>
#include <string>

namespace otfsprony
{
namespace
{

// Distance from the nearest integer below which the closed form loses
// relative accuracy and the direct sum is used instead.
constexpr double near_integer = 1e-6;

Complex dirichlet_direct(double x, std::size_t subchannels)
{
    const long half = static_cast<long>(subchannels / 2);
    Complex acc{0.0, 0.0};
    for (long m = -half; m < half; ++m)
    {
        acc += std::polar(1.0, 2.0 * pi * static_cast<double>(m) * x);
    }
    return acc;
}

void require_grid(const ComplexMatrix& g, const char* what)
{
    if (g.rows() < 1 || g.cols() < 1)
    {
        throw InvalidArgument(std::string(what) + ": empty grid");
    }
}

// exp(j 2 pi num / den) from the reduced integer numerator.
Complex unit_phase(long long num, long long den)
{
    long long r = num % den;
    if (r < 0)
    {
        r += den;
    }
    return std::polar(1.0, 2.0 * pi * static_cast<double>(r) /
                               static_cast<double>(den));
}

} // namespace

PilotConfig::PilotConfig(std::size_t repetitions, std::size_t subchannels,
                         double slot_duration)
    : m_repetitions(repetitions),
      m_subchannels(subchannels),
      m_slot_duration(slot_duration)
{
    if (repetitions < 2)
    {
        throw InvalidArgument("PilotConfig: N must be >= 2");
    }
    if (subchannels < 2 || subchannels % 2 != 0)
    {
        throw InvalidArgument("PilotConfig: M must be even and >= 2");
    }
    if (!(slot_duration > 0.0) || !std::isfinite(slot_duration))
    {
        throw InvalidArgument("PilotConfig: T must be positive");
    }
}

Complex dirichlet_kernel(double x, std::size_t subchannels)
{
    const double r = x - std::round(x);
    if (std::abs(r) < near_integer)
    {
        return dirichlet_direct(r, subchannels);
    }
    const double m = static_cast<double>(subchannels);
    // D_M has period 1 for even M, so the reduced argument is exact.
    return std::polar(1.0, -pi * r) * (std::sin(pi * m * r) / std::sin(pi * r));
}

ComplexVector pilot_samples(const PilotConfig& cfg, std::size_t guard_slots)
{
    const std::size_t m     = cfg.subchannels();
    const std::size_t total = (guard_slots + cfg.repetitions()) * m;
    ComplexVector s(static_cast<Index>(total));
    for (std::size_t i = 0; i < total; ++i)
    {
        // sample index relative to the start of the main window
        const long long k = static_cast<long long>(i) -
                            static_cast<long long>(guard_slots * m);
        long long r = k % static_cast<long long>(m);
        if (r < 0)
        {
            r += static_cast<long long>(m);
        }
        s[static_cast<Index>(i)] =
            dirichlet_kernel(static_cast<double>(r) / static_cast<double>(m), m);
    }
    return s;
}

Complex pilot_waveform(const PilotConfig& cfg, std::size_t guard_slots,
                       double t)
{
    const double slot  = cfg.slot_duration();
    const double begin = -static_cast<double>(guard_slots) * slot;
    const double end   = static_cast<double>(cfg.repetitions()) * slot;
    if (t < begin || t >= end)
    {
        return {0.0, 0.0};
    }
    return dirichlet_kernel(t / slot, cfg.subchannels());
}

DDGrid dd_impulse(const PilotConfig& cfg)
{
    DDGrid x = DDGrid::Zero(static_cast<Index>(cfg.repetitions()),
                            static_cast<Index>(cfg.subchannels()));
    x(0, 0) = 1.0;
    return x;
}

namespace
{

ComplexMatrix sft_kernel(const ComplexMatrix& in, int sign)
{
    const Index n_rows = in.rows();
    const Index n_cols = in.cols();
    const double scale =
        1.0 / std::sqrt(static_cast<double>(n_rows * n_cols));
    // The symplectic kernel is separable: exp(j 2 pi (k n / N - l m / M)).
    ComplexMatrix doppler(n_rows, n_rows);
    for (Index a = 0; a < n_rows; ++a)
    {
        for (Index b = 0; b < n_rows; ++b)
        {
            doppler(a, b) = unit_phase(sign * a * b, n_rows);
        }
    }
    ComplexMatrix delay(n_cols, n_cols);
    for (Index a = 0; a < n_cols; ++a)
    {
        for (Index b = 0; b < n_cols; ++b)
        {
            delay(a, b) = unit_phase(-sign * a * b, n_cols);
        }
    }
    return scale * (doppler * in * delay);
}

} // namespace

ComplexMatrix sft(const DDGrid& x_dd)
{
    require_grid(x_dd, "sft");
    return sft_kernel(x_dd, +1);
}

DDGrid inverse_sft(const ComplexMatrix& x_tf)
{
    require_grid(x_tf, "inverse_sft");
    return sft_kernel(x_tf, -1);
}

ComplexVector discrete_zak(const DDGrid& x_dd)
{
    require_grid(x_dd, "discrete_zak");
    const Index n_rows = x_dd.rows();
    const Index n_cols = x_dd.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_rows));
    ComplexVector x_td(n_rows * n_cols);
    for (Index l = 0; l < n_cols; ++l)
    {
        const ComplexVector col = x_dd.col(l);
        // inverse DFT carries 1/N; rescale to the 1/sqrt(N) convention
        const ComplexVector time =
            dft(col, DftDirection::inverse) * static_cast<double>(n_rows);
        for (Index n = 0; n < n_rows; ++n)
        {
            x_td[n * n_cols + l] = scale * time[n];
        }
    }
    return x_td;
}

ComplexVector pilot_via_otfs_appendix(const PilotConfig& cfg)
{
    const Index n_slots = static_cast<Index>(cfg.repetitions());
    const Index n_sub   = static_cast<Index>(cfg.subchannels());
    const ComplexMatrix x_tf = sft(dd_impulse(cfg));

    // s(t) = sum_m sum_n X_TF[n, m] g(t - n T) exp(j 2 pi m t / T), g the
    // unit rectangle on [0, T). At t = k T_s exactly one slot is active and
    // m t / T = m k / M.
    ComplexVector s(n_slots * n_sub);
    for (Index k = 0; k < n_slots * n_sub; ++k)
    {
        const Index slot = k / n_sub;
        Complex acc{0.0, 0.0};
        for (Index m = -n_sub / 2; m < n_sub / 2; ++m)
        {
            const Index bin = (m % n_sub + n_sub) % n_sub;
            acc += x_tf(slot, bin) * unit_phase(m * k, n_sub);
        }
        s[k] = acc;
    }
    return s;
}

} // namespace otfsprony

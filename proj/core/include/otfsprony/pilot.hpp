///
/// \file pilot.hpp
///
/// Dirichlet-kernel pilot and the two reference OTFS constructions
/// (time-frequency synthesis via the symplectic Fourier transform, and the
/// discrete Zak transform).
///
#ifndef OTFSPRONY_PILOT_HPP
#define OTFSPRONY_PILOT_HPP

#include <cstddef>

#include <otfsprony/numerics.hpp>

namespace otfsprony
{

///
/// Pilot grid geometry: `N` slots of duration `T`, each carrying `M`
/// subchannels, sampled every `T / M` seconds.
///
class PilotConfig
{
public:
    /// \throws InvalidArgument unless `N >= 2`, `M >= 2`, `M` even, `T > 0`.
    PilotConfig(std::size_t repetitions, std::size_t subchannels,
                double slot_duration = 1e-6);

    std::size_t repetitions() const noexcept { return m_repetitions; }
    std::size_t subchannels() const noexcept { return m_subchannels; }
    double slot_duration() const noexcept { return m_slot_duration; }
    double sampling_interval() const noexcept
    {
        return m_slot_duration / static_cast<double>(m_subchannels);
    }
    /// N * M
    std::size_t samples() const noexcept
    {
        return m_repetitions * m_subchannels;
    }

    /// Doppler resolution 1 / (N T)
    double doppler_bin() const noexcept
    {
        return 1.0 / (static_cast<double>(m_repetitions) * m_slot_duration);
    }

    bool operator==(const PilotConfig&) const = default;

private:
    std::size_t m_repetitions;
    std::size_t m_subchannels;
    double m_slot_duration;
};

/// Delay-Doppler grid, N x M, indexed (Doppler bin k, delay bin l).
using DDGrid = ComplexMatrix;

///
/// D_M(x) = sum_{m=-M/2}^{M/2-1} exp(j 2 pi m x).
///
/// Uses the closed form exp(-j pi x) sin(pi M x) / sin(pi x) away from the
/// integers and the direct sum near them.
///
Complex dirichlet_kernel(double x, std::size_t subchannels);

///
/// Sampled pilot s(k T_s). The first `guard_slots * M` samples are a cyclic
/// prefix, the remaining `N * M` samples cover the main window
/// k = 0 .. N M - 1.
///
ComplexVector pilot_samples(const PilotConfig& cfg, std::size_t guard_slots);

///
/// Continuous-time pilot s(t) = D_M(t / T) on the window
/// [-guard_slots T, N T), zero outside.
///
Complex pilot_waveform(const PilotConfig& cfg, std::size_t guard_slots,
                       double t);

/// Unit impulse at (k, l) = (0, 0).
DDGrid dd_impulse(const PilotConfig& cfg);

///
/// Symplectic Fourier transform. Output is indexed (n, m mod M), n the slot,
/// m the subcarrier.
///
ComplexMatrix sft(const DDGrid& x_dd);

/// Inverse of `sft` (conjugate kernel, same 1/sqrt(NM) normalisation).
DDGrid inverse_sft(const ComplexMatrix& x_tf);

///
/// Discrete Zak transform: x[n M + l] = 1/sqrt(N) sum_k X[k, l] e^{j 2 pi k n / N}.
///
ComplexVector discrete_zak(const DDGrid& x_dd);

///
/// Pilot obtained by feeding the DD impulse through the SFT and the
/// rectangular-pulse OTFS synthesis with subcarriers m in [-M/2, M/2 - 1],
/// sampled at k T_s, k = 0 .. N M - 1.
///
ComplexVector pilot_via_otfs_appendix(const PilotConfig& cfg);

} // namespace otfsprony

#endif

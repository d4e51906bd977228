///
/// \file estimator.hpp
///
/// Building blocks of the two-stage Prony estimator.
///
/// Stage 1 estimates the Doppler shifts from the slow-time recurrence shared
/// by all M columns of R. The Doppler phase is then removed by a
/// least-squares fit against the estimated phasor matrix, and each remaining
/// row is transformed to a delay spectrum Y[m], m in [-M/2, M/2 - 1], which is
/// a geometric sequence in m with ratio exp(-j 2 pi t_d / T). Stage 2 runs
/// Prony's method on that sequence.
///
#ifndef OTFSPRONY_ESTIMATOR_HPP
#define OTFSPRONY_ESTIMATOR_HPP

#include <span>
#include <vector>

#include <otfsprony/channel.hpp>

namespace otfsprony
{

/// Stage-1 roots with modulus outside [1/r, r] are flagged spurious.
inline constexpr double spurious_root_radius = 2.0;

/// Largest accepted condition number of the estimated phasor matrix.
inline constexpr double max_doppler_condition = 1e12;

struct DopplerSet
{
    std::vector<double> values;  ///< Hz, arg(Z) / (2 pi T), arg in (-pi, pi]
    std::vector<Complex> roots;  ///< Z_p
    std::vector<bool> spurious;  ///< |Z_p| outside the accepted annulus
    std::size_t p_hat = 0;

    /// Indices of the roots that are not flagged spurious.
    std::vector<std::size_t> reliable() const;
};

///
/// The M (N - p_hat) x (p_hat + 1) matrix formed by stacking, for every fast
/// time l, the Toeplitz matrix with rows (R[k, l], R[k-1, l], ..., R[k-p_hat, l]),
/// k = p_hat .. N-1.
///
/// \throws InvalidArgument unless 1 <= p_hat <= N - 1.
///
ComplexMatrix stacked_toeplitz(const ReceivedGrid& grid, std::size_t p_hat);

/// Doppler estimates from the stacked Prony system of order `p_hat`.
DopplerSet stage1_doppler(const ReceivedGrid& grid, std::size_t p_hat,
                          PronyMode mode = PronyMode::constrained);

struct Compensation
{
    ComplexMatrix v_hat;   ///< pinv(E_hat) R, P x M
    ComplexMatrix v_tilde; ///< v_hat with the Doppler ramp exp(-j 2 pi f l T_s) removed
    double condition = 1;  ///< cond(E_hat)
    double residual  = 0;  ///< ||R - E_hat v_hat||_F / ||R||_F
};

///
/// Least-squares removal of the Doppler phasors.
///
/// \throws IllConditionedDopplerSet when cond(E_hat) > max_doppler_condition.
///
Compensation doppler_compensate(const ReceivedGrid& grid,
                                std::span<const double> dopplers);

/// Uses every value in `dopplers`, spurious or not.
Compensation doppler_compensate(const ReceivedGrid& grid,
                                const DopplerSet& dopplers);

///
/// M-point DFT of one compensated row, stored on the centred index
/// m in [-M/2, M/2 - 1].
///
class DelaySpectrum
{
public:
    DelaySpectrum() = default;

    /// `centered[i]` holds Y[i - M/2].
    explicit DelaySpectrum(ComplexVector centered);

    std::size_t size() const noexcept
    {
        return static_cast<std::size_t>(m_centered.size());
    }
    int min_index() const noexcept
    {
        return -static_cast<int>(m_centered.size() / 2);
    }
    int max_index() const noexcept
    {
        return static_cast<int>(m_centered.size() / 2) - 1;
    }

    /// Y[m] for m in [min_index(), max_index()].
    Complex at(int m) const;

    const ComplexVector& centered() const noexcept
    {
        return m_centered;
    }

    /// The raw DFT output order, bins 0 .. M-1.
    ComplexVector storage_order() const;

private:
    ComplexVector m_centered;
};

/// \throws InvalidArgument for odd or empty rows.
DelaySpectrum delay_spectrum(const ComplexVector& v_row);

enum class SpectrumIndexing
{
    centered, ///< m in [-M/2, M/2 - 1]
    storage   ///< raw bins 0 .. M-1; only valid for integer delays
};

struct DelayRoot
{
    double delay; ///< seconds in [0, T)
    Complex root; ///< Z, nominally exp(-j 2 pi t_d / T)
};

///
/// Stage-2 Prony fit of `delays_per_doppler` (L) exponentials. The data
/// matrix has entries Y[L - M/2 + i - j], i = 0 .. M-L-1, j = 0 .. L.
///
/// \throws InvalidArgument unless 1 <= L <= M/2 - 1.
///
std::vector<DelayRoot> stage2_delay(
    const DelaySpectrum& spectrum, std::size_t delays_per_doppler,
    double slot_duration, PronyMode mode = PronyMode::constrained,
    SpectrumIndexing indexing = SpectrumIndexing::centered);

/// (1/M) mean_m Y[m] exp(+j 2 pi m t / T): least-squares gain of a single delay.
Complex estimate_amplitude(const DelaySpectrum& spectrum, double delay,
                           double slot_duration);

/// Joint least-squares gains when one spectrum carries several delays.
std::vector<Complex> estimate_amplitudes(const DelaySpectrum& spectrum,
                                         std::span<const double> delays,
                                         double slot_duration);

} // namespace otfsprony

#endif

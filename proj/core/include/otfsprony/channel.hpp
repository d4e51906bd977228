///
/// \file channel.hpp
///
/// Sparse multipath channel draws and received-grid synthesis.
///
/// The received samples are arranged as the N x M matrix R with
/// R(n, l) = r(n T + l T_s). For a periodic pilot with a cyclic guard of one
/// slot, R factors exactly as E V with
///
///   E(n, p) = exp(j 2 pi f_p n T)
///   V(p, l) = alpha_p D_M(l / M - t_p / T) exp(j 2 pi f_p l T_s).
///
#ifndef OTFSPRONY_CHANNEL_HPP
#define OTFSPRONY_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <otfsprony/pilot.hpp>
#include <otfsprony/rng.hpp>

namespace otfsprony
{

struct PathParams
{
    Complex gain;   ///< complex attenuation alpha
    double delay;   ///< seconds, 0 < delay < T
    double doppler; ///< Hz, |doppler| < 1 / (2T)
};

/// Integer and fractional parts of a path on the DD grid.
struct GridOffsets
{
    long delay_bin;
    double delay_fraction;
    long doppler_bin;
    double doppler_fraction;
};

GridOffsets grid_offsets(const PathParams& path, const PilotConfig& cfg);

/// \throws InvalidArgument when the delay or Doppler leaves its open range.
void validate_path(const PathParams& path, const PilotConfig& cfg);

enum class GainLaw
{
    complex_gaussian, ///< circular CN(0, 1)
    unit_modulus      ///< |alpha| = 1, uniform phase
};

struct ChannelSpec
{
    std::vector<PathParams> paths;
    std::optional<double> snr_db; ///< empty: noiseless
    std::uint64_t seed = 0;       ///< noise stream seed
};

struct ReceivedGrid
{
    ComplexMatrix samples; ///< N x M, (slow time n, fast time l)
    PilotConfig config;
};

///
/// Draw `count` paths: gains from `law`, delays uniform on
/// (0, delay_range T), Dopplers uniform on
/// (-doppler_range / (2T), doppler_range / (2T)).
///
std::vector<PathParams> draw_channel(Rng& rng, std::size_t count,
                                     const PilotConfig& cfg,
                                     double delay_range = 1.0,
                                     double doppler_range = 1.0,
                                     GainLaw law = GainLaw::complex_gaussian);

/// E(n, p) = exp(j 2 pi f_p n T), N x P.
ComplexMatrix build_E(std::span<const double> dopplers, std::size_t repetitions,
                      double slot_duration);

/// Same, taking the Dopplers from a path list.
ComplexMatrix build_E(std::span<const PathParams> paths, const PilotConfig& cfg);

/// V(p, l), P x M.
ComplexMatrix build_V(std::span<const PathParams> paths, const PilotConfig& cfg);

/// Noise variance giving `snr_db` for a grid of mean sample power `power`.
double noise_variance(double signal_power, double snr_db);

///
/// R = E V plus, when `spec.snr_db` is set, circular complex Gaussian noise of
/// variance ||E V||_F^2 / (N M) / 10^(snr/10), drawn from `spec.seed`.
///
ReceivedGrid synthesize_received(const PilotConfig& cfg, const ChannelSpec& spec);

///
/// Noiseless R evaluated sample by sample from
/// r(t) = sum_p alpha_p s(t - t_p) exp(j 2 pi f_p t) on the guarded pilot.
/// Independent of the E V factorisation; used to validate it.
///
ComplexMatrix synthesize_direct(const PilotConfig& cfg,
                                std::span<const PathParams> paths,
                                std::size_t guard_slots = 1);

/// N-point forward DFT of every column of R (Doppler bin k, delay bin l).
DDGrid dd_map(const ReceivedGrid& grid);

} // namespace otfsprony

#endif

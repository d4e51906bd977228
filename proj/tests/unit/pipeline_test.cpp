#include <gtest/gtest.h>

#include <otfsprony/pipeline.hpp>

#include <numeric>

#include "oracles.hpp"

namespace
{

using namespace otfsprony;

ReceivedGrid make_grid(const PilotConfig& cfg, std::vector<PathParams> paths,
                       std::optional<double> snr = std::nullopt, std::uint64_t seed = 0)
{
    ChannelSpec spec;
    spec.paths  = std::move(paths);
    spec.snr_db = snr;
    spec.seed   = seed;
    return synthesize_received(cfg, spec);
}

/// Largest parameter error of the best one-to-one pairing, in bins.
struct Worst
{
    double delay   = 0;
    double doppler = 0;
    double gain    = 0;
};

Worst worst_pairing(const std::vector<PathParams>& truth, const std::vector<PathEstimate>& est,
                    const PilotConfig& cfg)
{
    std::vector<std::size_t> perm(est.size());
    std::iota(perm.begin(), perm.end(), 0);
    Worst best{1e300, 1e300, 1e300};
    double best_score = 1e300;
    do
    {
        Worst w;
        for (std::size_t i = 0; i < truth.size(); ++i)
        {
            const auto& e = est[perm[i]];
            w.delay   = std::max(w.delay, std::abs(e.delay - truth[i].delay) / cfg.sampling_interval());
            w.doppler = std::max(w.doppler, std::abs(e.doppler - truth[i].doppler) / cfg.doppler_bin());
            w.gain    = std::max(w.gain, std::abs(e.gain - truth[i].gain));
        }
        const double s = std::max({w.delay, w.doppler, w.gain});
        if (s < best_score)
        {
            best_score = s;
            best       = w;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

TEST(EstimateFull, NoiselessFivePathsExact)
{
    const PilotConfig cfg(16, 16);
    Rng rng(71);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto paths = draw_channel(rng, 5, cfg, 1, 1, GainLaw::unit_modulus);
        const double sep = oracle::min_doppler_separation(paths, cfg.slot_duration());
        if (sep < 0.1)
        {
            continue;
        }
        EstimatorOptions opt;
        opt.p_hat = 5;
        const EstimationReport r = estimate_full(make_grid(cfg, paths), opt);
        ASSERT_EQ(r.paths.size(), 5u);
        EXPECT_EQ(r.p_hat, 5u);
        EXPECT_EQ(r.stage1_order, 5u);
        const Worst w = worst_pairing(paths, r.paths, cfg);
        EXPECT_LT(w.delay, 1e-6);
        EXPECT_LT(w.doppler, 1e-6);
        EXPECT_LT(w.gain, 1e-6);
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(EstimateFull, ZeroGridYieldsEmptyReport)
{
    const PilotConfig cfg(8, 8);
    const EstimationReport r = estimate_full(make_grid(cfg, {}));
    EXPECT_TRUE(r.empty());
    EXPECT_EQ(r.p_hat, 0u);
    EXPECT_EQ(r.order_trace.records.size(), 7u);
}

TEST(EstimateFull, SortedByDescendingEnergy)
{
    const PilotConfig cfg(16, 16);
    Rng rng(72);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto g = make_grid(cfg, draw_channel(rng, 4, cfg), 15.0, trial);
        const EstimationReport r = estimate_full(g);
        for (std::size_t i = 0; i + 1 < r.paths.size(); ++i)
        {
            EXPECT_GE(r.paths[i].row_energy, r.paths[i + 1].row_energy);
        }
        for (const auto& p : r.paths)
        {
            EXPECT_GE(p.delay, 0.0);
            EXPECT_LT(p.delay, cfg.slot_duration());
            EXPECT_LE(std::abs(p.doppler), 0.5 / cfg.slot_duration() + 1e-6);
        }
    }
}

TEST(EstimateFull, Deterministic)
{
    const PilotConfig cfg(16, 16);
    Rng rng(73);
    const auto g = make_grid(cfg, draw_channel(rng, 5, cfg), 10.0, 9);
    const EstimationReport a = estimate_full(g);
    const EstimationReport b = estimate_full(g);
    ASSERT_EQ(a.paths.size(), b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i)
    {
        EXPECT_EQ(a.paths[i].delay, b.paths[i].delay);
        EXPECT_EQ(a.paths[i].doppler, b.paths[i].doppler);
        EXPECT_EQ(a.paths[i].gain, b.paths[i].gain);
    }
}

TEST(EstimateFull, HeuristicNoiselessSinglePath)
{
    const PilotConfig cfg(16, 16);
    const PathParams p{Complex(-0.3, 0.9), 0.61e-6, 0.11e6};
    const EstimationReport r = estimate_full(make_grid(cfg, {p}));
    ASSERT_EQ(r.paths.size(), 1u);
    EXPECT_EQ(r.stage1_order, default_initial_order(16, std::nullopt));
    EXPECT_NEAR(r.paths[0].delay, p.delay, 1e-12);
    EXPECT_NEAR(r.paths[0].doppler, p.doppler, 1e-3);
    EXPECT_LT(std::abs(r.paths[0].gain - p.gain), 1e-8);
    EXPECT_FALSE(r.pruned_rows.empty());
    for (const auto& row : r.pruned_rows)
    {
        EXPECT_LT(row.index, r.dopplers.roots.size());
        EXPECT_LT(row.energy, 0.1 * r.paths[0].row_energy);
    }
}

TEST(EstimateFull, HeuristicNoiselessFivePaths)
{
    const PilotConfig cfg(16, 16);
    Rng rng(74);
    int exact = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial)
    {
        EstimatorOptions opt;
        opt.expected_paths = 5;
        const auto r = estimate_full(
            make_grid(cfg, draw_channel(rng, 5, cfg, 1, 1, GainLaw::unit_modulus)), opt);
        EXPECT_EQ(r.stage1_order, 10u);
        exact += r.paths.size() == 5 ? 1 : 0;
    }
    EXPECT_GE(exact, 19);
}

TEST(EstimateFull, TwoDelaysSharingADoppler)
{
    const PilotConfig cfg(8, 16);
    const std::vector<PathParams> paths{{Complex(1.0, 0.0), 0.2e-6, 0.1e6},
                                        {Complex(0.0, 0.7), 0.65e-6, 0.1e6}};
    EstimatorOptions opt;
    opt.p_hat              = 1;
    opt.delays_per_doppler = 2;
    const EstimationReport r = estimate_full(make_grid(cfg, paths), opt);
    ASSERT_EQ(r.paths.size(), 2u);
    const Worst w = worst_pairing(paths, r.paths, cfg);
    EXPECT_LT(w.delay, 1e-6);
    EXPECT_LT(w.doppler, 1e-6);
    EXPECT_LT(w.gain, 1e-6);
}

TEST(EstimateFull, MinNormModeAgreesNoiseless)
{
    const PilotConfig cfg(16, 16);
    Rng rng(75);
    const auto paths = draw_channel(rng, 3, cfg, 1, 1, GainLaw::unit_modulus);
    EstimatorOptions opt;
    opt.p_hat = 3;
    opt.mode  = PronyMode::min_norm;
    const EstimationReport r = estimate_full(make_grid(cfg, paths), opt);
    ASSERT_EQ(r.paths.size(), 3u);
    const Worst w = worst_pairing(paths, r.paths, cfg);
    EXPECT_LT(w.delay, 1e-6);
    EXPECT_LT(w.doppler, 1e-6);
}

TEST(EstimateFull, RejectsBadOptions)
{
    const PilotConfig cfg(8, 8);
    const auto g = make_grid(cfg, {{1.0, 0.3e-6, 0.0}});
    EstimatorOptions opt;
    opt.delays_per_doppler = 0;
    EXPECT_THROW(estimate_full(g, opt), InvalidArgument);
    opt.delays_per_doppler = 4;
    EXPECT_THROW(estimate_full(g, opt), InvalidArgument);
    opt = {};
    opt.p_hat = 8;
    EXPECT_THROW(estimate_full(g, opt), InvalidArgument);
    opt.p_hat = 0;
    EXPECT_THROW(estimate_full(g, opt), InvalidArgument);
    opt = {};
    opt.prune_threshold = 1.5;
    EXPECT_THROW(estimate_full(g, opt), InvalidArgument);
}

} // namespace

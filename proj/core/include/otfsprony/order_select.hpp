///
/// \file order_select.hpp
///
/// Model-order selection for Stage 1: residual curves, AIC and BIC, and
/// row-energy pruning of an overestimated Doppler set.
///
#ifndef OTFSPRONY_ORDER_SELECT_HPP
#define OTFSPRONY_ORDER_SELECT_HPP

#include <optional>
#include <string_view>
#include <vector>

#include <otfsprony/estimator.hpp>

namespace otfsprony
{

/// Applied to the RSS before taking logarithms.
inline constexpr double rss_floor = 1e-300;

/// Traces also clamp the RSS at this fraction of ||T||_F^2 before scoring,
/// so round-off residuals of an exact fit all score alike.
inline constexpr double relative_rss_floor = 1e-20;

/// Sample size entering the information criteria.
enum class SampleSize
{
    repetitions, ///< N, the pilot repetition count
    stacked_rows ///< M (N - p_hat), the rows of the stacked system
};

enum class OrderStrategy
{
    aic,
    bic,
    heuristic
};

std::string_view to_string(OrderStrategy s);
OrderStrategy parse_order_strategy(std::string_view name);

/// AIC = 2 (3 p_hat) + n log(rss / n)
double aic(std::size_t p_hat, double rss, double sample_size);

/// BIC = (3 p_hat) log n + n log(rss / n)
double bic(std::size_t p_hat, double rss, double sample_size);

struct OrderRecord
{
    std::size_t p_hat = 0;
    double rss        = 0; ///< min_{||a|| = 1} ||T a||^2
    double t_norm_sq  = 0; ///< ||T||_F^2
    double aic        = 0;
    double bic        = 0;

    double normalized_rss() const
    {
        return t_norm_sq > 0.0 ? rss / t_norm_sq : 0.0;
    }
};

struct OrderTrace
{
    std::vector<OrderRecord> records; ///< p_hat = 1, 2, ...
    std::optional<OrderStrategy> strategy;
    std::size_t chosen = 0;

    std::size_t argmin_aic() const;
    std::size_t argmin_bic() const;
};

/// RSS, AIC and BIC for p_hat = 1 .. p_hat_max.
OrderTrace rss_curve(const ReceivedGrid& grid, std::size_t p_hat_max,
                     SampleSize sample_size = SampleSize::repetitions);

/// Squared L2 norm of every row.
RealVector row_energies(const ComplexMatrix& m);

/// Rows whose energy is at least `threshold` times the largest row energy.
std::vector<std::size_t> heuristic_prune(const ComplexMatrix& v_tilde,
                                         double threshold = 0.1);

/// min(N - 1, 2 * expected), or N - 1 when nothing is expected.
std::size_t default_initial_order(std::size_t repetitions,
                                  std::optional<std::size_t> expected_paths);

struct OrderRequest
{
    OrderStrategy strategy = OrderStrategy::heuristic;
    std::size_t p_hat_init = 0; ///< heuristic only; 0 selects the default
    std::optional<std::size_t> expected_paths;
    double prune_threshold = 0.1;
    PronyMode mode         = PronyMode::constrained;
    SampleSize sample_size = SampleSize::repetitions;
};

struct HeuristicOutcome
{
    DopplerSet initial;              ///< Stage 1 at p_hat_init
    std::vector<std::size_t> used;   ///< non-spurious roots of `initial`
    Compensation compensation;       ///< rows follow `used`
    RealVector energies;             ///< row energies of compensation.v_tilde
    std::vector<std::size_t> survivors; ///< rows kept, into `used`
    std::vector<double> survivor_dopplers;
};

struct OrderSelection
{
    std::size_t p_hat = 0;
    OrderTrace trace;
    std::optional<HeuristicOutcome> heuristic;
};

/// Chooses p_hat over 1 .. N-1 (aic, bic) or by pruning (heuristic).
OrderSelection select_order(const ReceivedGrid& grid, const OrderRequest& request);

} // namespace otfsprony

#endif

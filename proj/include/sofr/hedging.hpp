#pragma once

// Futures hedge ratios for swaps and caplets and a discrete self-financing
// wealth ledger with hedge funding and proportional collateral.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sofr/curves.hpp"
#include "sofr/futures.hpp"
#include "sofr/options.hpp"
#include "sofr/swaps.hpp"

namespace sofr {

struct HedgeRatios {
    double valid_at = 0.0;
    double value = 0.0;         ///< V_t, the replicated price
    double funding_cash = 0.0;  ///< phi^0_t B^h_t, the funding-account balance (1 - beta) V_t
    std::vector<double> futures;  ///< phi^1..phi^n, one per futures contract

    /// phi^0 in units of an account worth `account_value` at valid_at.
    double funding_units(double account_value) const { return funding_cash / account_value; }
};

/// One position per swap leg, each hedged with the futures on that leg's period.
/// `futures[j-1]` is the state of the contract on [T_{j-1}, T_j].
HedgeRatios swap_hedge(const MarketModel& model, double x_t, double t, const SwapSpec& spec,
                       std::span<const FuturesState> futures);

HedgeRatios caplet_hedge(const MarketModel& model, double x_t, double t, const FuturesContract& period, double kappa,
                         const FuturesState& futures, double notional = 1.0,
                         std::optional<double> beta = std::nullopt);

/// What a strategy may look at on the rebalancing grid.
struct StrategyContext {
    std::size_t step = 0;
    double t = 0.0;
    double funding_rate = 0.0;  ///< observed r^h_t
    double factor = 0.0;        ///< x_t recovered as r^h_t - alpha^h_t
    std::span<const FuturesState> futures;
    const RatePath* history = nullptr;  ///< realized path; only times <= t may be read
};

using Strategy = std::function<HedgeRatios(const StrategyContext&)>;
using StateFunction = std::function<double(const StrategyContext&)>;

struct WealthOptions {
    IntegrationScheme scheme = IntegrationScheme::LeftRiemann;
    StateFunction target;    ///< price the wealth should track, after any payment due at t
    StateFunction payout;    ///< contract cash flow paid out of wealth at t
    double tracking_threshold = 1e-3;  ///< absolute; breaches are flagged, not fatal
};

struct WealthLedger {
    std::vector<double> times;
    std::vector<double> wealth;      ///< V_t
    std::vector<double> portfolio;   ///< V^p_t = phi^0 B^h_t
    std::vector<double> collateral;  ///< C_t = -beta V_t
    std::vector<double> funding_units;  ///< phi^0_t
    std::vector<std::vector<double>> positions;  ///< phi^j_t per step
    std::vector<double> futures_pnl;         ///< sum_j phi^j (f^j_{t+h} - f^j_t), indexed by step end
    std::vector<double> funding_interest;    ///< (1 - beta) V (B^h growth - 1)
    std::vector<double> collateral_interest; ///< beta V (B^c growth - 1)
    std::vector<double> payouts;
    std::vector<double> target;
    std::vector<double> error;       ///< V_t - target_t

    double max_abs_error = 0.0;
    double terminal_error = 0.0;
    bool threshold_breached = false;
};

/// Explicit Euler ledger: V_{i+1} = V_i + V_i[(1-beta)(g^h - 1) + beta(g^c - 1)] + sum phi (f_{i+1} - f_i) - payout,
/// with g the per-step account growth of r^h and r^c. Futures are marked from the closed form on the path.
/// Without an initial wealth the ledger starts at the target price.
WealthLedger simulate_wealth(const MarketModel& model, const RatePath& path, const Strategy& strategy,
                             std::span<const FuturesContract> contracts, double beta,
                             std::optional<double> initial_wealth, const WealthOptions& options = {});

/// Everything needed to hedge one instrument. The closures refer to the model
/// they were built from, which must outlive the program.
struct HedgeProgram {
    std::vector<FuturesContract> contracts;
    Strategy strategy;
    StateFunction target;
    StateFunction payout;
    double beta = 0.0;
    double maturity = 0.0;
    double notional = 1.0;
};

HedgeProgram swap_program(const MarketModel& model, const SwapSpec& spec);
HedgeProgram caplet_program(const MarketModel& model, const FuturesContract& period, double kappa,
                            double notional = 1.0, double beta = 0.0);

/// Runs a program on one path, starting from its own price at path.times.front().
WealthLedger run_hedge(const MarketModel& model, const RatePath& path, const HedgeProgram& program,
                       IntegrationScheme scheme = IntegrationScheme::LeftRiemann, double tracking_threshold = 1e-3);

struct RefinementPoint {
    double dt = 0.0;
    double mean_abs_terminal_error = 0.0;
    double mean_max_abs_error = 0.0;
    std::size_t paths = 0;
};

struct ReplicationStudy {
    std::vector<RefinementPoint> points;
    double slope = 0.0;  ///< least-squares slope of log error against log dt
};

/// Hedges the program on `paths` exact-law factor paths for each step size; the coarser
/// grids are subsamples of the finest, so every step size sees the same Brownian path.
/// Step sizes must be integer multiples of the smallest one.
ReplicationStudy replication_study(const MarketModel& model, const HedgeProgram& program, double start,
                                   std::span<const double> step_sizes, std::size_t paths, std::uint64_t seed,
                                   IntegrationScheme scheme = IntegrationScheme::LeftRiemann);

/// Least-squares slope of log(errors) against log(dts).
double refinement_slope(std::span<const double> dts, std::span<const double> errors);

}  // namespace sofr

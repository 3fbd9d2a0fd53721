#pragma once

// SOFR futures referencing the compounded average over [T, T+delta]: the
// futures rate before and inside the reference period and its volatility.

#include <optional>
#include <span>
#include <vector>

#include "sofr/curves.hpp"

namespace sofr {

enum class FuturesStyle { ThreeMonthCompound, OneMonthSimple };

struct FuturesContract {
    double start = 0.0;  ///< T, model time
    double delta = 0.25; ///< year fraction of the reference period
    FuturesStyle style = FuturesStyle::ThreeMonthCompound;

    double end() const { return start + delta; }
    void validate() const;
};

struct FuturesState {
    double rate = 0.0;     ///< R^{s,f}_t(T, T+delta)
    double delta = 0.25;
    double accrued = 0.0;  ///< realized int_T^t r^s du, zero before T

    double price() const { return 1.0 - rate; }
    /// Y_t = 1 + delta R^{s,f}_t
    double growth() const { return 1.0 + delta * rate; }
};

/// Futures rate R^{s,f}_t. `accrued` is the realized int_T^t r^s du and is
/// required once t > T.
double futures_rate(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                    std::optional<double> accrued = std::nullopt);

FuturesState futures_state(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                           std::optional<double> accrued = std::nullopt);

/// Realized int_{t0}^{t1} (x + alpha^s) du read from a path.
double realized_accrual(const RatePath& path, const BasisCurve& basis, double t0, double t1);

/// Futures state with the accrual (if any) taken from `history`.
FuturesState futures_state_from_history(const MarketModel& model, double x_t, double t,
                                        const FuturesContract& contract, const RatePath* history);

/// Instantaneous lognormal volatility sigma^Y_t of Y_t.
double futures_vol(const FuturesContract& contract, double t, const FactorParams& params);

/// v_Y^2 = int_t^horizon (sigma^Y_u)^2 du in closed form.
double accumulated_variance(const FuturesContract& contract, double t, double horizon, const FactorParams& params);

/// Simple forward rate over the reference period implied by synthetic s-bonds
/// (with the realized accrual once inside the period).
double forward_rate_s(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                      std::optional<double> accrued = std::nullopt);

/// Futures rate minus the s-bond forward rate.
double convexity_adjustment(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                            std::optional<double> accrued = std::nullopt);

struct StripRow {
    FuturesContract contract;
    double rate = 0.0;
    double price = 0.0;
    double convexity = 0.0;
};

/// Futures rates for contracts that have not started yet.
std::vector<StripRow> futures_strip(const MarketModel& model, double x_t, double t,
                                    std::span<const FuturesContract> contracts);

}  // namespace sofr

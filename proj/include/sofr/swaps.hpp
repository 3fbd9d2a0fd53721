#pragma once

// Single- and multi-period SOFR swaps discounted with the effective funding
// rate r^beta = (1 - beta) r^h + beta r^c, plus the single-curve LIBOR formulas
// kept as a regression baseline.

#include <optional>
#include <span>
#include <vector>

#include "sofr/curves.hpp"
#include "sofr/futures.hpp"

namespace sofr {

/// Payment dates T_0 < T_1 < ... < T_n in model time.
struct TenorStructure {
    std::vector<double> dates;

    TenorStructure() = default;
    explicit TenorStructure(std::vector<double> d);

    std::size_t periods() const { return dates.empty() ? 0 : dates.size() - 1; }
    double start() const { return dates.front(); }
    double end() const { return dates.back(); }
    /// delta_j = T_j - T_{j-1}, j = 1..n
    double delta(std::size_t j) const { return dates[j] - dates[j - 1]; }
    FuturesContract contract(std::size_t j) const { return {dates[j - 1], delta(j), FuturesStyle::ThreeMonthCompound}; }
    void validate() const;

    /// n equal periods of length `step` starting at `start`.
    static TenorStructure regular(double start, double step, std::size_t n);
};

enum class Side { Payer, Receiver };

struct SwapSpec {
    TenorStructure tenor;
    double fixed_rate = 0.0;
    double notional = 1.0;
    Side side = Side::Payer;  ///< payer pays fixed and receives compound SOFR
    /// Constant collateral fraction; unset means the model's own beta curve.
    std::optional<double> collateral_fraction;

    double sign() const { return side == Side::Payer ? 1.0 : -1.0; }
    void validate() const;
};

/// Discount basis alpha^beta for an optional constant beta override.
BasisCurve discount_basis(const MarketModel& model, std::optional<double> beta);

struct LegValue {
    std::size_t index = 0;  ///< j, 1-based
    double start = 0.0;
    double end = 0.0;
    double floating = 0.0;  ///< value of the compound SOFR payment at T_j
    double fixed = 0.0;     ///< value of (1 + delta_j kappa) - 1, the fixed payment
    double discount = 0.0;  ///< B^beta(t, T_j)
    bool in_progress = false;
};

struct SwapValuation {
    double price = 0.0;       ///< signed, times notional
    double fair_rate = 0.0;
    double annuity = 0.0;     ///< sum delta_j B^beta(t, T_j) over live legs
    std::vector<LegValue> legs;  ///< per unit notional, payer orientation
};

/// Price at time t. Legs with T_j < t are settled and dropped; a leg with
/// T_{j-1} < t <= T_j uses the realized accrual from `history`.
SwapValuation swap_valuation(const MarketModel& model, double x_t, double t, const SwapSpec& spec,
                             const RatePath* history = nullptr);

double swap_price(const MarketModel& model, double x_t, double t, const SwapSpec& spec,
                  const RatePath* history = nullptr);

/// The same single-period price written through the futures growth Y_t.
double swap_price_futures_repr(const MarketModel& model, double x_t, double t, const FuturesState& futures,
                               const SwapSpec& spec);

/// Fixed rate that zeroes the swap price.
double forward_swap_rate(const MarketModel& model, double x_t, double t, const TenorStructure& tenor,
                         std::optional<double> beta = std::nullopt, const RatePath* history = nullptr);

/// Single-curve formulas on a vector of discount factors B(t, T_0..T_n).
namespace classical {

double forward_libor(double bond_start, double bond_end, double delta);
/// B(t,T_0) - B(t,T_n) - kappa sum delta_j B(t,T_j), payer orientation.
double swap_price(std::span<const double> bonds, const TenorStructure& tenor, double kappa);
/// (B(t,T_0) - B(t,T_n)) / sum delta_j B(t,T_j)
double swap_rate(std::span<const double> bonds, const TenorStructure& tenor);
/// sum delta_j B(t,T_j) (kappa_t - kappa)
double swap_mark_to_market(std::span<const double> bonds, const TenorStructure& tenor, double kappa);
/// Leg by leg sum of delta_j B(t,T_j) (L_j - kappa) with forward LIBOR L_j.
double swap_price_from_forwards(std::span<const double> bonds, const TenorStructure& tenor, double kappa);

/// Synthetic bonds B(t, T_j) of the model discounting at x + alpha^label.
std::vector<double> synthetic_bonds(const MarketModel& model, double x_t, double t, const TenorStructure& tenor,
                                    RateLabel label = RateLabel::s);

}  // namespace classical

}  // namespace sofr

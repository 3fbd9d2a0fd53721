#pragma once

// SOFR caplets, caps, floors and swaptions in the one-factor multi-curve model,
// the Gaussian exchange-option kernel behind them, and Black-style baselines.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sofr/curves.hpp"
#include "sofr/futures.hpp"
#include "sofr/swaps.hpp"

namespace sofr {

double normal_cdf(double z);
double normal_pdf(double z);

/// E(c1 e^{eta1 - var1/2} - c2 e^{eta2 - var2/2})^+ for zero-mean jointly Gaussian (eta1, eta2).
struct GaussianExchangeInputs {
    double c1 = 1.0;
    double c2 = 1.0;
    double var1 = 0.0;
    double var2 = 0.0;
    double cov = 0.0;
};

struct ExchangeValue {
    double value = 0.0;
    double h_plus = 0.0;
    double h_minus = 0.0;
    double k = 0.0;  ///< std dev of eta1 - eta2
};

ExchangeValue gaussian_exchange_detail(const GaussianExchangeInputs& in);
double gaussian_exchange(const GaussianExchangeInputs& in);

struct CapletValuation {
    double price = 0.0;    ///< times notional
    double h_plus = 0.0;
    double h_minus = 0.0;
    double gamma = 0.0;    ///< A^beta e^rho e^{(w^2(t,T) - v_Y^2)/2}
    double lambda = 0.0;   ///< A^beta e^rho (1 + delta kappa) e^{w^2(t,T+delta)/2}
    double v_y = 0.0;      ///< sqrt of accumulated futures variance to settlement
    double growth = 0.0;   ///< Y_t
    double n_hat = 1.0;    ///< n(t,T+delta) / (n(t,T+delta) - n(t,T)), 1 inside the period
    double strike = 0.0;
    FuturesContract contract;
};

/// Caplet paying (R^s(T,T+delta) - kappa)^+ delta at T+delta, per `notional`.
CapletValuation caplet_valuation(const MarketModel& model, double x_t, double t, const FuturesContract& period,
                                 double kappa, const FuturesState& futures, double notional = 1.0,
                                 std::optional<double> beta = std::nullopt);
double caplet_price(const MarketModel& model, double x_t, double t, const FuturesContract& period, double kappa,
                    const FuturesState& futures, double notional = 1.0, std::optional<double> beta = std::nullopt);

struct CapSpec {
    TenorStructure tenor;
    double strike = 0.0;
    double notional = 1.0;
    std::optional<double> collateral_fraction;

    void validate() const;
    /// Payer swap with the same dates, strike, notional and collateral.
    SwapSpec swap() const;
};

struct CapValuation {
    double price = 0.0;
    std::vector<CapletValuation> caplets;
};

/// Sum of the live caplets; a caplet already fixing reads its accrual from `history`.
CapValuation cap_valuation(const MarketModel& model, double x_t, double t, const CapSpec& spec,
                           const RatePath* history = nullptr);
double cap_price(const MarketModel& model, double x_t, double t, const CapSpec& spec,
                 const RatePath* history = nullptr);
/// Floor from parity: cap - payer swap.
double floor_price(const MarketModel& model, double x_t, double t, const CapSpec& spec,
                   const RatePath* history = nullptr);

struct SwaptionSpec {
    SwapSpec underlying;     ///< payer or receiver, strike = fixed rate, expiry = first tenor date
    std::size_t nodes = 64;  ///< Gauss-Legendre nodes per exercise segment
    double tolerance = 1e-8; ///< node-doubling tolerance per unit notional

    double expiry() const { return underlying.tenor.start(); }
};

struct SwaptionValuation {
    double price = 0.0;
    double discount = 0.0;         ///< B^beta(t, T_0)
    double factor_mean = 0.0;      ///< E[x_{T_0} | x_t] under the pricing measure
    double factor_stdev = 0.0;
    double tilt_mean_shift = 0.0;  ///< change of mean from the discount tilt
    std::size_t nodes = 0;
    double refined_price = 0.0;    ///< same integral with twice the nodes
    double node_doubling_diff = 0.0;
    double closed_form_price = 0.0; ///< exact integration of the exponential terms between roots
    std::vector<double> exercise_boundary;  ///< roots of the expiry swap value in x
    bool monotone = true;          ///< expiry swap value monotone in x on the scan grid
};

/// Underlying swap value at expiry as a function of x_{T_0} (signed, times notional).
double swap_value_at_expiry(const MarketModel& model, double x_expiry, const SwaptionSpec& spec);

SwaptionValuation swaption_valuation(const MarketModel& model, double x_t, double t, const SwaptionSpec& spec);
double swaption_price(const MarketModel& model, double x_t, double t, const SwaptionSpec& spec);

/// Black-style single-curve baselines. `total_variance` is int sigma^2 du up to the fixing.
namespace black {

/// int_t^T vol(u)^2 du for a piecewise-constant volatility schedule.
double total_variance(const PiecewiseConstant& vol, double t, double T);

double caplet(double bond_start, double bond_end, double delta, double kappa, double total_variance);
double floorlet(double bond_start, double bond_end, double delta, double kappa, double total_variance);
/// Cap from bonds B(t, T_0..T_n); caplet j fixes at T_{j-1}.
double cap(std::span<const double> bonds, const TenorStructure& tenor, double kappa, const PiecewiseConstant& vol,
           double t);
double floor(std::span<const double> bonds, const TenorStructure& tenor, double kappa, const PiecewiseConstant& vol,
             double t);
/// Lognormal swap-rate swaption on the annuity numeraire.
double swaption(std::span<const double> bonds, const TenorStructure& tenor, double kappa, double total_variance,
                Side side = Side::Payer);

}  // namespace black

}  // namespace sofr

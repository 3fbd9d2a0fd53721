#include "sofr/futures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sofr/errors.hpp"

namespace sofr {

void FuturesContract::validate() const {
    SOFR_REQUIRE(std::isfinite(start) && std::isfinite(delta), DomainError, "non-finite futures contract times");
    SOFR_REQUIRE(delta > 0.0, DomainError, "futures reference period must have positive length");
}

namespace {

constexpr double time_tol = 1e-12;

double log_growth(const MarketModel& model, double x_t, double t, const FuturesContract& c,
                  std::optional<double> accrued) {
    c.validate();
    const double T = c.start, U = c.end();
    SOFR_REQUIRE(t <= U + time_tol, DomainError, "valuation time is past the futures settlement");
    const BasisCurve& s = model.basis(RateLabel::s);
    if (t <= T) {
        const IntegratedFactorLaw law = integrated_factor_law(x_t, t, T, U, model.factor);
        return s.integral(T, U) + law.mean + 0.5 * law.variance;
    }
    if (!accrued) throw MissingHistoryError("futures rate inside the reference period needs the realized accrual");
    const double tt = std::min(t, U);
    const IntegratedFactorLaw law = integrated_factor_law(x_t, tt, tt, U, model.factor);
    return *accrued + s.integral(tt, U) + law.mean + 0.5 * law.variance;
}

}  // namespace

double futures_rate(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                    std::optional<double> accrued) {
    return std::expm1(log_growth(model, x_t, t, contract, accrued)) / contract.delta;
}

FuturesState futures_state(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                           std::optional<double> accrued) {
    FuturesState st;
    st.rate = futures_rate(model, x_t, t, contract, accrued);
    st.delta = contract.delta;
    st.accrued = (t > contract.start && accrued) ? *accrued : 0.0;
    return st;
}

double realized_accrual(const RatePath& path, const BasisCurve& basis, double t0, double t1) {
    return path.integral(t0, t1) + basis.integral(t0, t1);
}

FuturesState futures_state_from_history(const MarketModel& model, double x_t, double t,
                                        const FuturesContract& contract, const RatePath* history) {
    std::optional<double> acc;
    if (t > contract.start) {
        if (history == nullptr)
            throw MissingHistoryError("futures rate inside the reference period needs the realized path");
        acc = realized_accrual(*history, model.basis(RateLabel::s), contract.start, std::min(t, contract.end()));
    }
    return futures_state(model, x_t, t, contract, acc);
}

double futures_vol(const FuturesContract& contract, double t, const FactorParams& p) {
    const double T = contract.start, U = contract.end();
    SOFR_REQUIRE(t <= U + time_tol, DomainError, "valuation time is past the futures settlement");
    if (t <= T) return p.sigma * std::exp(-p.b * (T - t)) * n_factor(T, U, p.b);
    return p.sigma * n_factor(std::min(t, U), U, p.b);
}

double accumulated_variance(const FuturesContract& contract, double t, double horizon, const FactorParams& p) {
    const double T = contract.start, U = contract.end();
    SOFR_REQUIRE(t <= horizon + time_tol && horizon <= U + time_tol, DomainError,
                 "accumulated variance needs t <= horizon <= T + delta");
    horizon = std::min(std::max(horizon, t), U);
    const double s2 = p.sigma * p.sigma;
    double v2 = 0.0;
    if (t < T) {
        // sigma^2 n(T,U)^2 int_t^{T1} e^{-2b(T-u)} du
        const double T1 = std::min(horizon, T);
        const double nTU = n_factor(T, U, p.b);
        const double span = T1 - t;
        v2 += s2 * nTU * nTU * std::exp(-2.0 * p.b * (T - T1)) * span * detail::phi1(2.0 * p.b * span);
    }
    if (horizon > T) {
        const double s0 = std::max(t, T);
        v2 += s2 * (n_squared_integral(s0, U, p.b) - n_squared_integral(horizon, U, p.b));
    }
    return std::max(v2, 0.0);
}

double forward_rate_s(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                      std::optional<double> accrued) {
    const double T = contract.start, U = contract.end();
    SOFR_REQUIRE(t <= U + time_tol, DomainError, "valuation time is past the futures settlement");
    const BasisCurve& s = model.basis(RateLabel::s);
    const double tt = std::min(t, U);
    const double log_end = std::log(zcb_kernel(x_t, tt, U, model.factor, s));
    double log_start;
    if (t <= T) {
        log_start = std::log(zcb_kernel(x_t, t, T, model.factor, s));
    } else {
        if (!accrued) throw MissingHistoryError("forward rate inside the reference period needs the realized accrual");
        log_start = *accrued;
    }
    return std::expm1(log_start - log_end) / contract.delta;
}

double convexity_adjustment(const MarketModel& model, double x_t, double t, const FuturesContract& contract,
                            std::optional<double> accrued) {
    return futures_rate(model, x_t, t, contract, accrued) - forward_rate_s(model, x_t, t, contract, accrued);
}

std::vector<StripRow> futures_strip(const MarketModel& model, double x_t, double t,
                                    std::span<const FuturesContract> contracts) {
    std::vector<StripRow> rows;
    rows.reserve(contracts.size());
    for (const FuturesContract& c : contracts) {
        if (t > c.start)
            throw MissingHistoryError("contract starting at " + std::to_string(c.start) +
                                      " is already fixing; the strip only covers forward contracts");
        StripRow row;
        row.contract = c;
        row.rate = futures_rate(model, x_t, t, c);
        row.price = 1.0 - row.rate;
        row.convexity = row.rate - forward_rate_s(model, x_t, t, c);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sofr

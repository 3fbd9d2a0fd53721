#include "sofr/swaps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sofr/errors.hpp"

namespace sofr {

namespace {
constexpr double time_tol = 1e-12;
}

TenorStructure::TenorStructure(std::vector<double> d) : dates(std::move(d)) { validate(); }

void TenorStructure::validate() const {
    SOFR_REQUIRE(dates.size() >= 2, DomainError, "a tenor structure needs at least two dates");
    for (std::size_t j = 1; j < dates.size(); ++j)
        SOFR_REQUIRE(dates[j - 1] < dates[j], DomainError, "tenor dates must be strictly increasing");
}

TenorStructure TenorStructure::regular(double start, double step, std::size_t n) {
    SOFR_REQUIRE(step > 0.0 && n >= 1, DomainError, "regular tenor needs step > 0 and n >= 1");
    std::vector<double> d(n + 1);
    for (std::size_t j = 0; j <= n; ++j) d[j] = start + step * static_cast<double>(j);
    return TenorStructure(std::move(d));
}

void SwapSpec::validate() const {
    tenor.validate();
    SOFR_REQUIRE(std::isfinite(fixed_rate), DomainError, "fixed rate must be finite");
    SOFR_REQUIRE(notional > 0.0, DomainError, "notional must be positive");
    if (collateral_fraction)
        SOFR_REQUIRE(*collateral_fraction >= 0.0 && *collateral_fraction <= 1.0, DomainError,
                     "collateral fraction beta must lie in [0,1]");
}

BasisCurve discount_basis(const MarketModel& model, std::optional<double> beta) {
    return beta ? model.effective_basis(*beta) : model.effective_basis();
}

SwapValuation swap_valuation(const MarketModel& model, double x_t, double t, const SwapSpec& spec,
                             const RatePath* history) {
    spec.validate();
    const TenorStructure& ten = spec.tenor;
    SOFR_REQUIRE(t <= ten.end() + time_tol, DomainError,
                 "valuation time " + std::to_string(t) + " is after the last payment date");
    const BasisCurve disc = discount_basis(model, spec.collateral_fraction);
    const BasisCurve& s = model.basis(RateLabel::s);

    SwapValuation out;
    double floating_sum = 0.0;
    for (std::size_t j = 1; j <= ten.periods(); ++j) {
        const double T0 = ten.dates[j - 1], T1 = ten.dates[j];
        if (T1 < t - time_tol) continue;
        LegValue leg;
        leg.index = j;
        leg.start = T0;
        leg.end = T1;
        leg.in_progress = t > T0;
        const double tt = std::min(t, T1);
        // A^{s,beta}_j = exp(int_{T_{j-1}}^{T_j} (alpha^s - alpha^beta))
        const double spread = std::exp(s.integral(T0, T1) - disc.integral(T0, T1));
        leg.discount = synthetic_bond(model, disc, x_t, tt, T1, history);
        const double start_bond = synthetic_bond(model, disc, x_t, tt, T0, history);
        leg.floating = spread * start_bond - leg.discount;
        leg.fixed = ten.delta(j) * spec.fixed_rate * leg.discount;
        out.annuity += ten.delta(j) * leg.discount;
        floating_sum += leg.floating;
        out.price += leg.floating - leg.fixed;
        out.legs.push_back(leg);
    }
    out.fair_rate = floating_sum / out.annuity;
    out.price *= spec.sign() * spec.notional;
    return out;
}

double swap_price(const MarketModel& model, double x_t, double t, const SwapSpec& spec, const RatePath* history) {
    return swap_valuation(model, x_t, t, spec, history).price;
}

double swap_price_futures_repr(const MarketModel& model, double x_t, double t, const FuturesState& futures,
                               const SwapSpec& spec) {
    spec.validate();
    if (spec.tenor.periods() != 1)
        throw UnsupportedRepresentationError("the futures representation covers single-period swaps only");
    const FuturesContract c = spec.tenor.contract(1);
    const double T = c.start, U = c.end();
    SOFR_REQUIRE(t <= U + time_tol, DomainError, "valuation time is past the payment date");
    const FactorParams& p = model.factor;
    const double tt = std::min(t, U);
    const BasisCurve disc = discount_basis(model, spec.collateral_fraction);
    // A^beta(t,U) e^{rho(x_t)} = exp(-int alpha^beta - n(t,U) x_t - a int n)
    const double scale = std::exp(-disc.integral(tt, U) - n_factor(tt, U, p.b) * x_t - p.a * n_integral(tt, U, p.b));
    const double vY2 = accumulated_variance(c, tt, U, p);
    const double wT = (tt < T) ? w_squared(tt, T, p) : 0.0;
    const double wU = w_squared(tt, U, p);
    const double K = 1.0 + c.delta * spec.fixed_rate;
    const double value = scale * (futures.growth() * std::exp(0.5 * (wT - vY2)) - K * std::exp(0.5 * wU));
    return spec.sign() * spec.notional * value;
}

double forward_swap_rate(const MarketModel& model, double x_t, double t, const TenorStructure& tenor,
                         std::optional<double> beta, const RatePath* history) {
    SwapSpec spec;
    spec.tenor = tenor;
    spec.collateral_fraction = beta;
    return swap_valuation(model, x_t, t, spec, history).fair_rate;
}

namespace classical {

namespace {
void check_bonds(std::span<const double> bonds, const TenorStructure& tenor) {
    tenor.validate();
    SOFR_REQUIRE(bonds.size() == tenor.dates.size(), DomainError, "need one bond price per tenor date");
    for (double b : bonds) SOFR_REQUIRE(b > 0.0 && std::isfinite(b), DomainError, "bond prices must be positive");
}

double annuity(std::span<const double> bonds, const TenorStructure& tenor) {
    double a = 0.0;
    for (std::size_t j = 1; j < bonds.size(); ++j) a += tenor.delta(j) * bonds[j];
    return a;
}
}  // namespace

double forward_libor(double bond_start, double bond_end, double delta) {
    SOFR_REQUIRE(delta > 0.0, DomainError, "accrual must be positive");
    return (bond_start / bond_end - 1.0) / delta;
}

double swap_price(std::span<const double> bonds, const TenorStructure& tenor, double kappa) {
    check_bonds(bonds, tenor);
    return bonds.front() - bonds.back() - kappa * annuity(bonds, tenor);
}

double swap_rate(std::span<const double> bonds, const TenorStructure& tenor) {
    check_bonds(bonds, tenor);
    return (bonds.front() - bonds.back()) / annuity(bonds, tenor);
}

double swap_mark_to_market(std::span<const double> bonds, const TenorStructure& tenor, double kappa) {
    return annuity(bonds, tenor) * (swap_rate(bonds, tenor) - kappa);
}

double swap_price_from_forwards(std::span<const double> bonds, const TenorStructure& tenor, double kappa) {
    check_bonds(bonds, tenor);
    double v = 0.0;
    for (std::size_t j = 1; j < bonds.size(); ++j)
        v += tenor.delta(j) * bonds[j] * (forward_libor(bonds[j - 1], bonds[j], tenor.delta(j)) - kappa);
    return v;
}

std::vector<double> synthetic_bonds(const MarketModel& model, double x_t, double t, const TenorStructure& tenor,
                                    RateLabel label) {
    SOFR_REQUIRE(t <= tenor.start() + time_tol, DomainError, "single-curve formulas need t <= T_0");
    std::vector<double> b;
    b.reserve(tenor.dates.size());
    for (double T : tenor.dates) b.push_back(synthetic_bond(model, label, x_t, std::min(t, T), T));
    return b;
}

}  // namespace classical

}  // namespace sofr

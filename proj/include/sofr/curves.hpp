#pragma once

// The multi-curve market: one Gaussian factor plus deterministic bases for
// SOFR (s), EFFR (e), unsecured funding (u), collateral (c) and the hedge
// funding rate (h), together with the proportional collateralization level.

#include <array>
#include <cstddef>
#include <vector>

#include "sofr/basis_curve.hpp"
#include "sofr/vasicek.hpp"

namespace sofr {

struct MarketModel {
    FactorParams factor;
    std::array<BasisCurve, 5> bases{BasisCurve::constant(0.0, RateLabel::s), BasisCurve::constant(0.0, RateLabel::e),
                                    BasisCurve::constant(0.0, RateLabel::u), BasisCurve::constant(0.0, RateLabel::c),
                                    BasisCurve::constant(0.0, RateLabel::h)};
    /// beta_t in [0,1]: collateral posted is -beta V.
    PiecewiseConstant collateral_fraction{0.0};

    const BasisCurve& basis(RateLabel label) const { return bases[static_cast<std::size_t>(label)]; }
    BasisCurve& basis(RateLabel label) { return bases[static_cast<std::size_t>(label)]; }
    void set_basis(RateLabel label, PiecewiseConstant spread) { basis(label) = BasisCurve(std::move(spread), label); }

    /// alpha^beta for the model's own collateral fraction.
    BasisCurve effective_basis() const;
    /// alpha^beta for a constant collateral fraction.
    BasisCurve effective_basis(double beta) const;

    void validate() const;
};

/// alpha^beta = (1 - beta) alpha^h + beta alpha^c on the merged knot set.
BasisCurve effective_basis(const PiecewiseConstant& beta, const BasisCurve& h_basis, const BasisCurve& c_basis);

/// A realized factor path on a time grid. `factor_integral[i]` is the integral of
/// x from times[0] to times[i]; paths from the Monte-Carlo engine store it exactly.
struct RatePath {
    std::vector<double> times;
    std::vector<double> factor;
    std::vector<double> factor_integral;

    std::size_t size() const { return times.size(); }
    void validate() const;

    /// Index of a grid time; throws CoverageError when `t` is not on the grid.
    std::size_t index_of(double t) const;
    /// Index of the last grid time <= t.
    std::size_t index_at_or_before(double t) const;
    /// Integral of x over [t0, t1]; exact at grid points, linear in between.
    double integral(double t0, double t1) const;
    /// Factor value at grid index i.
    double x(std::size_t i) const { return factor[i]; }
};

/// Realized short rate x_t + alpha_t at grid index i.
double realized_rate(const RatePath& path, const BasisCurve& basis, std::size_t i);

/// Bond discounting at x + basis. For t <= T the conditional expectation
/// exp(m - n x_t - int basis); for t > T the accrual exp(int_T^t (x + basis))
/// read from `history`.
double synthetic_bond(const MarketModel& model, const BasisCurve& basis, double x_t, double t, double T,
                      const RatePath* history = nullptr);
double synthetic_bond(const MarketModel& model, RateLabel label, double x_t, double t, double T,
                      const RatePath* history = nullptr);

enum class IntegrationScheme { LeftRiemann, Trapezoid, Exact };

/// exp of the integral of the realized rate over [t0, t1]; both must be grid times.
double account_growth(const RatePath& path, const BasisCurve& basis, double t0, double t1,
                      IntegrationScheme scheme = IntegrationScheme::LeftRiemann);

}  // namespace sofr

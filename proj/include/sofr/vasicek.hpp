#pragma once

// One-factor Gaussian (Vasicek) factor process dx = (a - b x) dt + sigma dW and
// the analytic quantities built on it. Times are year fractions from the model
// epoch; nothing here knows about dates.

#include <Eigen/Core>

#include "sofr/basis_curve.hpp"

namespace sofr {

struct FactorParams {
    double a = 0.0;      ///< drift level
    double b = 0.0;      ///< mean-reversion speed, >= 0
    double sigma = 0.0;  ///< volatility, >= 0
    double x0 = 0.0;     ///< factor value at the epoch

    void validate() const;
};

namespace detail {
// Entire functions behind the b -> 0 limits, evaluated without cancellation:
//   phi1(z) = (1 - e^-z)/z,  phi2(z) = (z - 1 + e^-z)/z^2,
//   psi(z)  = (z - 2(1 - e^-z) + (1 - e^-2z)/2)/z^3.
double phi1(double z);
double phi2(double z);
double psi(double z);
}  // namespace detail

/// n(t,T) = (1 - e^{-b(T-t)})/b, with limit T - t at b = 0.
double n_factor(double t, double T, double b);

/// Integral over u in [t,T] of n(u,T).
double n_integral(double t, double T, double b);
/// Integral over u in [t,T] of n(u,T)^2.
double n_squared_integral(double t, double T, double b);

/// m(t,T) = sigma^2/2 int n^2 - a int n, closed form.
double m_factor(double t, double T, const FactorParams& p);

/// exp(m(t,T) - n(t,T) x_t - int_t^T basis): the zero-coupon bond discounting at x + basis.
double zcb_kernel(double x_t, double t, double T, const FactorParams& p, const BasisCurve& basis);

/// E[exp(-int_t^T x du) | x_t], the bond with zero basis.
double factor_discount(double x_t, double t, double T, const FactorParams& p);

/// Conditional law given x_t of the integral X = int_T^U x du and of the state x_U.
struct IntegratedFactorLaw {
    double mean = 0.0;            ///< mu(t,T,U)
    double variance = 0.0;        ///< v^2(t,T,U)
    double state_mean = 0.0;      ///< E[x_U]
    double state_variance = 0.0;  ///< Var[x_U]
    double covariance = 0.0;      ///< Cov[x_U, X]

    /// Covariance matrix of (x_U, X).
    Eigen::Matrix2d covariance_matrix() const;
};

IntegratedFactorLaw integrated_factor_law(double x_t, double t, double T, double U, const FactorParams& p);

/// E[x_T | x_t].
double factor_mean(double x_t, double t, double T, const FactorParams& p);
/// Var[x_T | x_t].
double factor_variance(double t, double T, const FactorParams& p);

/// sigma^2 * int_t^T n(u,T)^2 du: variance of the T-bond's log price accumulated over [t,T].
double w_squared(double t, double T, const FactorParams& p);

}  // namespace sofr

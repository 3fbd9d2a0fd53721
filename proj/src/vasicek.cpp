#include "sofr/vasicek.hpp"

#include <cmath>
#include <string>

#include "sofr/errors.hpp"

namespace sofr {

void FactorParams::validate() const {
    SOFR_REQUIRE(std::isfinite(a) && std::isfinite(b) && std::isfinite(sigma) && std::isfinite(x0), DomainError,
                 "factor parameters must be finite");
    SOFR_REQUIRE(b >= 0.0, DomainError, "mean-reversion speed b must be >= 0");
    SOFR_REQUIRE(sigma >= 0.0, DomainError, "volatility sigma must be >= 0");
}

namespace detail {

namespace {
// Below this the Taylor series are used; they converge to machine precision in
// well under 25 terms there, and the closed forms lose no digits above it.
constexpr double series_cutoff = 0.5;
constexpr int series_terms = 25;
}  // namespace

double phi1(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z / 2.0 + z * z / 6.0;
    return -std::expm1(-z) / z;
}

double phi2(double z) {
    if (std::abs(z) < series_cutoff) {
        // sum_k (-z)^k / (k+2)!
        double term = 0.5, sum = 0.0;
        for (int k = 0; k < series_terms; ++k) {
            sum += term;
            term *= -z / (k + 3);
        }
        return sum;
    }
    return (z + std::expm1(-z)) / (z * z);
}

double psi(double z) {
    if (std::abs(z) < series_cutoff) {
        // sum_{k>=3} (-1)^{k+1} (2^{k-1} - 2) / k! z^{k-3}
        double sum = 0.0, zpow = 1.0, fact = 6.0, two_pow = 4.0;
        for (int k = 3; k < 3 + series_terms; ++k) {
            const double sign = (k % 2 == 1) ? 1.0 : -1.0;
            sum += sign * (two_pow - 2.0) / fact * zpow;
            zpow *= z;
            fact *= k + 1;
            two_pow *= 2.0;
        }
        return sum;
    }
    return (z + 2.0 * std::expm1(-z) - 0.5 * std::expm1(-2.0 * z)) / (z * z * z);
}

}  // namespace detail

namespace {

double horizon(double t, double T) {
    if (!(t <= T + 1e-12))
        throw DomainError("time ordering violated: t = " + std::to_string(t) + " > T = " + std::to_string(T));
    return std::max(T - t, 0.0);
}

}  // namespace

double n_factor(double t, double T, double b) {
    const double tau = horizon(t, T);
    return tau * detail::phi1(b * tau);
}

double n_integral(double t, double T, double b) {
    const double tau = horizon(t, T);
    return tau * tau * detail::phi2(b * tau);
}

double n_squared_integral(double t, double T, double b) {
    const double tau = horizon(t, T);
    return tau * tau * tau * detail::psi(b * tau);
}

double m_factor(double t, double T, const FactorParams& p) {
    return 0.5 * p.sigma * p.sigma * n_squared_integral(t, T, p.b) - p.a * n_integral(t, T, p.b);
}

double factor_discount(double x_t, double t, double T, const FactorParams& p) {
    return std::exp(m_factor(t, T, p) - n_factor(t, T, p.b) * x_t);
}

double zcb_kernel(double x_t, double t, double T, const FactorParams& p, const BasisCurve& basis) {
    return std::exp(m_factor(t, T, p) - n_factor(t, T, p.b) * x_t - basis.integral(t, T));
}

double factor_mean(double x_t, double t, double T, const FactorParams& p) {
    const double tau = horizon(t, T);
    return x_t * std::exp(-p.b * tau) + p.a * tau * detail::phi1(p.b * tau);
}

double factor_variance(double t, double T, const FactorParams& p) {
    const double tau = horizon(t, T);
    return p.sigma * p.sigma * tau * detail::phi1(2.0 * p.b * tau);
}

double w_squared(double t, double T, const FactorParams& p) {
    if (t >= T) return 0.0;
    return p.sigma * p.sigma * n_squared_integral(t, T, p.b);
}

Eigen::Matrix2d IntegratedFactorLaw::covariance_matrix() const {
    Eigen::Matrix2d m;
    m << state_variance, covariance, covariance, variance;
    return m;
}

IntegratedFactorLaw integrated_factor_law(double x_t, double t, double T, double U, const FactorParams& p) {
    const double lead = horizon(t, T);
    const double span = horizon(T, U);
    const double s2 = p.sigma * p.sigma;

    IntegratedFactorLaw law;
    const double n_tT = n_factor(t, T, p.b);
    const double n_tU = n_factor(t, U, p.b);
    const double n_TU = n_factor(T, U, p.b);
    law.mean = (n_tU - n_tT) * x_t + p.a * (n_integral(t, U, p.b) - n_integral(t, T, p.b));
    // n(u,U) - n(u,T) = e^{-b(T-u)} n(T,U) for u <= T.
    law.variance = s2 * n_TU * n_TU * lead * detail::phi1(2.0 * p.b * lead) + s2 * n_squared_integral(T, U, p.b);
    law.state_mean = factor_mean(x_t, t, U, p);
    law.state_variance = factor_variance(t, U, p);
    // Cov(x_U, int_t^U x) = sigma^2 n(t,U)^2 / 2, minus the part carried by int_t^T x.
    const double decay = std::exp(-p.b * span);
    law.covariance = 0.5 * s2 * (n_tU * n_tU - decay * n_tT * n_tT);
    return law;
}

}  // namespace sofr

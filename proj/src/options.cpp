#include "sofr/options.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sofr/errors.hpp"
#include "sofr/quadrature.hpp"

namespace sofr {

namespace {
constexpr double time_tol = 1e-12;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::acos(-1.0));
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

ExchangeValue gaussian_exchange_detail(const GaussianExchangeInputs& in) {
    SOFR_REQUIRE(in.c1 > 0.0 && in.c2 >= 0.0, DomainError, "exchange scale factors must be positive");
    SOFR_REQUIRE(in.var1 >= 0.0 && in.var2 >= 0.0, DomainError, "variances must be nonnegative");
    const double det_tol = 1e-14 * std::max(1.0, in.var1 * in.var2);
    SOFR_REQUIRE(in.var1 * in.var2 - in.cov * in.cov >= -det_tol, DomainError,
                 "exchange covariance matrix is not positive semidefinite");
    ExchangeValue out;
    const double k2 = std::max(in.var1 + in.var2 - 2.0 * in.cov, 0.0);
    out.k = std::sqrt(k2);
    if (in.c2 == 0.0) {
        out.value = in.c1;
        out.h_plus = out.h_minus = std::numeric_limits<double>::infinity();
        return out;
    }
    if (out.k == 0.0) {
        out.value = std::max(in.c1 - in.c2, 0.0);
        const double inf = std::numeric_limits<double>::infinity();
        out.h_plus = out.h_minus = in.c1 > in.c2 ? inf : -inf;
        return out;
    }
    out.h_plus = std::log(in.c1 / in.c2) / out.k + 0.5 * out.k;
    out.h_minus = out.h_plus - out.k;
    out.value = in.c1 * normal_cdf(out.h_plus) - in.c2 * normal_cdf(out.h_minus);
    return out;
}

double gaussian_exchange(const GaussianExchangeInputs& in) { return gaussian_exchange_detail(in).value; }

CapletValuation caplet_valuation(const MarketModel& model, double x_t, double t, const FuturesContract& period,
                                 double kappa, const FuturesState& futures, double notional,
                                 std::optional<double> beta) {
    period.validate();
    SOFR_REQUIRE(kappa > 0.0, DomainError, "caplet strike must be positive");
    SOFR_REQUIRE(notional > 0.0, DomainError, "notional must be positive");
    const double T = period.start, U = period.end();
    SOFR_REQUIRE(t <= U + time_tol, DomainError, "valuation time is past the caplet payment date");
    const FactorParams& p = model.factor;
    const double tt = std::min(t, U);
    const BasisCurve disc = discount_basis(model, beta);

    CapletValuation cv;
    cv.contract = period;
    cv.strike = kappa;
    cv.growth = futures.growth();
    const double scale =
        std::exp(-disc.integral(tt, U) - n_factor(tt, U, p.b) * x_t - p.a * n_integral(tt, U, p.b));
    const double vY2 = accumulated_variance(period, tt, U, p);
    const double wT = (tt < T) ? w_squared(tt, T, p) : 0.0;
    const double wU = w_squared(tt, U, p);
    const double K = 1.0 + period.delta * kappa;
    cv.v_y = std::sqrt(vY2);
    cv.gamma = scale * std::exp(0.5 * (wT - vY2));
    cv.lambda = scale * K * std::exp(0.5 * wU);

    // Only eta1 - eta2 matters; its variance is v_Y^2.
    const ExchangeValue ex = gaussian_exchange_detail({cv.gamma * cv.growth, cv.lambda, vY2, 0.0, 0.0});
    cv.h_plus = ex.h_plus;
    cv.h_minus = ex.h_minus;
    cv.price = notional * ex.value;
    if (tt < T) {
        const double nU = n_factor(tt, U, p.b), nT = n_factor(tt, T, p.b);
        cv.n_hat = nU / (nU - nT);
    } else {
        cv.n_hat = 1.0;
    }
    return cv;
}

double caplet_price(const MarketModel& model, double x_t, double t, const FuturesContract& period, double kappa,
                    const FuturesState& futures, double notional, std::optional<double> beta) {
    return caplet_valuation(model, x_t, t, period, kappa, futures, notional, beta).price;
}

void CapSpec::validate() const {
    tenor.validate();
    SOFR_REQUIRE(strike > 0.0, DomainError, "cap strike must be positive");
    SOFR_REQUIRE(notional > 0.0, DomainError, "notional must be positive");
    if (collateral_fraction)
        SOFR_REQUIRE(*collateral_fraction >= 0.0 && *collateral_fraction <= 1.0, DomainError,
                     "collateral fraction beta must lie in [0,1]");
}

SwapSpec CapSpec::swap() const {
    SwapSpec s;
    s.tenor = tenor;
    s.fixed_rate = strike;
    s.notional = notional;
    s.side = Side::Payer;
    s.collateral_fraction = collateral_fraction;
    return s;
}

CapValuation cap_valuation(const MarketModel& model, double x_t, double t, const CapSpec& spec,
                           const RatePath* history) {
    spec.validate();
    SOFR_REQUIRE(t <= spec.tenor.end() + time_tol, DomainError, "valuation time is after the last cap payment");
    CapValuation out;
    for (std::size_t j = 1; j <= spec.tenor.periods(); ++j) {
        const FuturesContract c = spec.tenor.contract(j);
        if (c.end() < t - time_tol) continue;
        const FuturesState fs = futures_state_from_history(model, x_t, t, c, history);
        out.caplets.push_back(
            caplet_valuation(model, x_t, t, c, spec.strike, fs, spec.notional, spec.collateral_fraction));
        out.price += out.caplets.back().price;
    }
    return out;
}

double cap_price(const MarketModel& model, double x_t, double t, const CapSpec& spec, const RatePath* history) {
    return cap_valuation(model, x_t, t, spec, history).price;
}

double floor_price(const MarketModel& model, double x_t, double t, const CapSpec& spec, const RatePath* history) {
    return cap_price(model, x_t, t, spec, history) - swap_price(model, x_t, t, spec.swap(), history);
}

namespace {

// The expiry swap value as sum_k coef_k exp(-slope_k x).
struct ExponentialSum {
    std::vector<double> coef;
    std::vector<double> slope;

    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k) v += coef[k] * std::exp(-slope[k] * x);
        return v;
    }
};

ExponentialSum expiry_swap_terms(const MarketModel& model, const SwaptionSpec& spec) {
    const SwapSpec& sw = spec.underlying;
    sw.validate();
    const TenorStructure& ten = sw.tenor;
    const double T0 = ten.start();
    const FactorParams& p = model.factor;
    const BasisCurve disc = discount_basis(model, sw.collateral_fraction);
    const BasisCurve& s = model.basis(RateLabel::s);
    const double scale = sw.sign() * sw.notional;
    ExponentialSum g;
    for (std::size_t j = 1; j <= ten.periods(); ++j) {
        const double Ta = ten.dates[j - 1], Tb = ten.dates[j];
        const double spread = std::exp(s.integral(Ta, Tb) - disc.integral(Ta, Tb));
        g.coef.push_back(scale * spread * std::exp(m_factor(T0, Ta, p) - disc.integral(T0, Ta)));
        g.slope.push_back(n_factor(T0, Ta, p.b));
        const double K = 1.0 + ten.delta(j) * sw.fixed_rate;
        g.coef.push_back(-scale * K * std::exp(m_factor(T0, Tb, p) - disc.integral(T0, Tb)));
        g.slope.push_back(n_factor(T0, Tb, p.b));
    }
    return g;
}

}  // namespace

double swap_value_at_expiry(const MarketModel& model, double x_expiry, const SwaptionSpec& spec) {
    return expiry_swap_terms(model, spec)(x_expiry);
}

SwaptionValuation swaption_valuation(const MarketModel& model, double x_t, double t, const SwaptionSpec& spec) {
    SOFR_REQUIRE(spec.nodes >= 2, DomainError, "swaption quadrature needs at least two nodes");
    const double T0 = spec.expiry();
    SOFR_REQUIRE(t <= T0 + time_tol, DomainError, "swaption valuation time is after expiry");
    const FactorParams& p = model.factor;
    const double tt = std::min(t, T0);
    const ExponentialSum g = expiry_swap_terms(model, spec);
    const BasisCurve disc = discount_basis(model, spec.underlying.collateral_fraction);

    SwaptionValuation out;
    out.nodes = spec.nodes;
    out.discount = zcb_kernel(x_t, tt, T0, p, disc);
    // Pricing with B^beta(., T_0) as numeraire tilts x_{T_0} by exp(-int x):
    // the mean moves by -Cov(x_{T_0}, int_t^{T_0} x) = -sigma^2 n(t,T_0)^2 / 2.
    const double nt0 = n_factor(tt, T0, p.b);
    out.tilt_mean_shift = -0.5 * p.sigma * p.sigma * nt0 * nt0;
    out.factor_mean = factor_mean(x_t, tt, T0, p) + out.tilt_mean_shift;
    out.factor_stdev = std::sqrt(factor_variance(tt, T0, p));
    const double mu = out.factor_mean, sd = out.factor_stdev;

    if (sd == 0.0) {
        out.price = out.refined_price = out.closed_form_price = out.discount * std::max(g(mu), 0.0);
        return out;
    }

    // Locate sign changes of g on a standardized grid, then refine by bisection.
    constexpr double z_max = 10.0;
    constexpr int scan = 400;
    auto gz = [&](double z) { return g(mu + sd * z); };
    std::vector<double> roots;
    double z_prev = -z_max, g_prev = gz(z_prev);
    const double dir = spec.underlying.sign();
    for (int i = 1; i <= scan; ++i) {
        const double z = -z_max + 2.0 * z_max * i / scan;
        const double gv = gz(z);
        if (dir * (gv - g_prev) < -1e-14 * (std::abs(gv) + std::abs(g_prev) + spec.underlying.notional))
            out.monotone = false;
        if ((g_prev <= 0.0) != (gv <= 0.0)) {
            double lo = z_prev, hi = z, glo = g_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = gz(mid);
                if ((gm <= 0.0) == (glo <= 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        z_prev = z;
        g_prev = gv;
    }
    for (double r : roots) out.exercise_boundary.push_back(mu + sd * r);

    std::vector<double> edges{-z_max};
    edges.insert(edges.end(), roots.begin(), roots.end());
    edges.push_back(z_max);

    const QuadratureRule rule = gauss_legendre(spec.nodes);
    const QuadratureRule fine = gauss_legendre(2 * spec.nodes);
    auto integrand = [&](double z) { return gz(z) * normal_pdf(z); };
    double coarse_sum = 0.0, fine_sum = 0.0, exact_sum = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double lo = edges[s], hi = edges[s + 1];
        if (gz(0.5 * (lo + hi)) <= 0.0) continue;
        coarse_sum += integrate_legendre(rule, lo, hi, integrand);
        fine_sum += integrate_legendre(fine, lo, hi, integrand);
        // E[e^{-n X} 1{z in (l,u)}] = e^{-n mu + n^2 sd^2 / 2} (N(u + n sd) - N(l + n sd))
        const double l = (s == 0) ? -inf : lo;
        const double u = (s + 2 == edges.size()) ? inf : hi;
        for (std::size_t k = 0; k < g.coef.size(); ++k) {
            const double ns = g.slope[k] * sd;
            exact_sum += g.coef[k] * std::exp(-g.slope[k] * mu + 0.5 * ns * ns) *
                         (normal_cdf(u + ns) - normal_cdf(l + ns));
        }
    }
    out.price = out.discount * coarse_sum;
    out.refined_price = out.discount * fine_sum;
    out.closed_form_price = out.discount * exact_sum;
    out.node_doubling_diff = std::abs(out.refined_price - out.price);
    if (out.node_doubling_diff > spec.tolerance * spec.underlying.notional)
        throw NumericalError("swaption quadrature did not converge: " + std::to_string(spec.nodes) + " vs " +
                             std::to_string(2 * spec.nodes) + " nodes differ by " +
                             std::to_string(out.node_doubling_diff));
    return out;
}

double swaption_price(const MarketModel& model, double x_t, double t, const SwaptionSpec& spec) {
    return swaption_valuation(model, x_t, t, spec).price;
}

namespace black {

double total_variance(const PiecewiseConstant& vol, double t, double T) {
    SOFR_REQUIRE(t <= T + time_tol, DomainError, "variance horizon must not precede t");
    std::vector<double> sq;
    for (double v : vol.values()) sq.push_back(v * v);
    return PiecewiseConstant(vol.knots(), std::move(sq)).integral(t, std::max(t, T));
}

namespace {
struct D {
    double plus, minus;
};
D black_d(double F, double K, double var) {
    const double v = std::sqrt(var);
    const double dp = (std::log(F / K) + 0.5 * var) / v;
    return {dp, dp - v};
}
}  // namespace

double caplet(double bond_start, double bond_end, double delta, double kappa, double var) {
    SOFR_REQUIRE(kappa > 0.0 && var >= 0.0, DomainError, "Black caplet needs kappa > 0 and nonnegative variance");
    const double F = classical::forward_libor(bond_start, bond_end, delta);
    SOFR_REQUIRE(F > 0.0, DomainError, "Black caplet needs a positive forward rate");
    if (var == 0.0) return bond_end * delta * std::max(F - kappa, 0.0);
    const D d = black_d(F, kappa, var);
    return bond_end * delta * (F * normal_cdf(d.plus) - kappa * normal_cdf(d.minus));
}

double floorlet(double bond_start, double bond_end, double delta, double kappa, double var) {
    SOFR_REQUIRE(kappa > 0.0 && var >= 0.0, DomainError, "Black floorlet needs kappa > 0 and nonnegative variance");
    const double F = classical::forward_libor(bond_start, bond_end, delta);
    SOFR_REQUIRE(F > 0.0, DomainError, "Black floorlet needs a positive forward rate");
    if (var == 0.0) return bond_end * delta * std::max(kappa - F, 0.0);
    const D d = black_d(F, kappa, var);
    return bond_end * delta * (kappa * normal_cdf(-d.minus) - F * normal_cdf(-d.plus));
}

double cap(std::span<const double> bonds, const TenorStructure& tenor, double kappa, const PiecewiseConstant& vol,
           double t) {
    SOFR_REQUIRE(bonds.size() == tenor.dates.size(), DomainError, "need one bond price per tenor date");
    double v = 0.0;
    for (std::size_t j = 1; j < bonds.size(); ++j)
        v += caplet(bonds[j - 1], bonds[j], tenor.delta(j), kappa, total_variance(vol, t, tenor.dates[j - 1]));
    return v;
}

double floor(std::span<const double> bonds, const TenorStructure& tenor, double kappa, const PiecewiseConstant& vol,
             double t) {
    SOFR_REQUIRE(bonds.size() == tenor.dates.size(), DomainError, "need one bond price per tenor date");
    double v = 0.0;
    for (std::size_t j = 1; j < bonds.size(); ++j)
        v += floorlet(bonds[j - 1], bonds[j], tenor.delta(j), kappa, total_variance(vol, t, tenor.dates[j - 1]));
    return v;
}

double swaption(std::span<const double> bonds, const TenorStructure& tenor, double kappa, double var, Side side) {
    SOFR_REQUIRE(kappa > 0.0 && var >= 0.0, DomainError, "Black swaption needs kappa > 0 and nonnegative variance");
    const double S = classical::swap_rate(bonds, tenor);
    SOFR_REQUIRE(S > 0.0, DomainError, "Black swaption needs a positive swap rate");
    double annuity = 0.0;
    for (std::size_t j = 1; j < bonds.size(); ++j) annuity += tenor.delta(j) * bonds[j];
    if (var == 0.0) return annuity * std::max(side == Side::Payer ? S - kappa : kappa - S, 0.0);
    const D d = black_d(S, kappa, var);
    if (side == Side::Payer) return annuity * (S * normal_cdf(d.plus) - kappa * normal_cdf(d.minus));
    return annuity * (kappa * normal_cdf(-d.minus) - S * normal_cdf(-d.plus));
}

}  // namespace black

}  // namespace sofr

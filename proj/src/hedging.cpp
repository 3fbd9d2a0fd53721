#include "sofr/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sofr/errors.hpp"
#include "sofr/mc.hpp"

namespace sofr {

namespace {
constexpr double time_tol = 1e-10;

double beta_at(const MarketModel& model, std::optional<double> beta, double t) {
    return beta ? *beta : model.collateral_fraction.value(t);
}

double constant_beta(const MarketModel& model, std::optional<double> beta) {
    if (beta) return *beta;
    SOFR_REQUIRE(model.collateral_fraction.is_constant(), DomainError,
                 "hedge simulation needs a constant collateral fraction");
    return model.collateral_fraction.values()[0];
}
}  // namespace

HedgeRatios swap_hedge(const MarketModel& model, double x_t, double t, const SwapSpec& spec,
                       std::span<const FuturesState> futures) {
    spec.validate();
    const TenorStructure& ten = spec.tenor;
    SOFR_REQUIRE(futures.size() == ten.periods(), DomainError, "swap hedge needs one futures state per leg");
    SOFR_REQUIRE(t <= ten.end() + time_tol, DomainError, "hedge time is after the last payment");
    const FactorParams& p = model.factor;
    const BasisCurve disc = discount_basis(model, spec.collateral_fraction);

    HedgeRatios h;
    h.valid_at = t;
    h.futures.assign(ten.periods(), 0.0);
    for (std::size_t j = 1; j <= ten.periods(); ++j) {
        const FuturesContract c = ten.contract(j);
        const double T = c.start, U = c.end();
        if (U < t - time_tol) continue;
        const double tt = std::min(t, U);
        const double scale =
            std::exp(-disc.integral(tt, U) - n_factor(tt, U, p.b) * x_t - p.a * n_integral(tt, U, p.b));
        const double vY2 = accumulated_variance(c, tt, U, p);
        const double wT = (tt < T) ? w_squared(tt, T, p) : 0.0;
        const double wU = w_squared(tt, U, p);
        const double Y = futures[j - 1].growth();
        const double K = 1.0 + c.delta * spec.fixed_rate;
        // Floating and fixed legs as functions of the futures growth Y and x.
        const double P1 = scale * Y * std::exp(0.5 * (wT - vY2));
        const double P2 = scale * K * std::exp(0.5 * wU);
        h.value += P1 - P2;
        double phi;
        if (tt < T) {
            const double nU = n_factor(tt, U, p.b), nT = n_factor(tt, T, p.b);
            const double dn = std::exp(-p.b * (T - tt)) * n_factor(T, U, p.b);
            phi = (nT * P1 - nU * P2) / (Y * dn / c.delta);
        } else {
            phi = -P2 / (Y / c.delta);
        }
        h.futures[j - 1] = spec.sign() * spec.notional * phi;
    }
    h.value *= spec.sign() * spec.notional;
    h.funding_cash = (1.0 - beta_at(model, spec.collateral_fraction, t)) * h.value;
    return h;
}

HedgeRatios caplet_hedge(const MarketModel& model, double x_t, double t, const FuturesContract& period, double kappa,
                         const FuturesState& futures, double notional, std::optional<double> beta) {
    const CapletValuation cv = caplet_valuation(model, x_t, t, period, kappa, futures, notional, beta);
    const double Y = cv.growth;
    const double unit_price = cv.price / notional;
    double n_plus;
    if (cv.v_y > 0.0)
        n_plus = normal_cdf(cv.h_plus);
    else
        n_plus = (cv.gamma * Y > cv.lambda) ? 1.0 : 0.0;
    HedgeRatios h;
    h.valid_at = t;
    h.value = cv.price;
    h.futures = {-notional * (cv.gamma * Y * n_plus - cv.n_hat * unit_price) / (Y / period.delta)};
    h.funding_cash = (1.0 - beta_at(model, beta, t)) * cv.price;
    return h;
}

WealthLedger simulate_wealth(const MarketModel& model, const RatePath& path, const Strategy& strategy,
                             std::span<const FuturesContract> contracts, double beta,
                             std::optional<double> initial_wealth, const WealthOptions& options) {
    path.validate();
    SOFR_REQUIRE(beta >= 0.0 && beta <= 1.0, DomainError, "collateral fraction beta must lie in [0,1]");
    const std::size_t N = path.size();
    const std::size_t m = contracts.size();
    const BasisCurve& bh = model.basis(RateLabel::h);
    const BasisCurve& bc = model.basis(RateLabel::c);

    // Futures marks on the grid, frozen at their settlement value after expiry.
    std::vector<std::vector<FuturesState>> marks(N, std::vector<FuturesState>(m));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            const double tk = std::min(path.times[i], contracts[k].end());
            marks[i][k] = futures_state_from_history(model, path.factor[i], tk, contracts[k], &path);
        }

    auto context = [&](std::size_t i) {
        StrategyContext ctx;
        ctx.step = i;
        ctx.t = path.times[i];
        ctx.funding_rate = realized_rate(path, bh, i);
        ctx.factor = ctx.funding_rate - bh.value(ctx.t);
        ctx.futures = marks[i];
        ctx.history = &path;
        return ctx;
    };

    WealthLedger L;
    L.times = path.times;
    L.wealth.assign(N, 0.0);
    L.portfolio.assign(N, 0.0);
    L.collateral.assign(N, 0.0);
    L.funding_units.assign(N, 0.0);
    L.positions.assign(N, std::vector<double>(m, 0.0));
    L.futures_pnl.assign(N, 0.0);
    L.funding_interest.assign(N, 0.0);
    L.collateral_interest.assign(N, 0.0);
    L.payouts.assign(N, 0.0);
    L.target.assign(N, std::numeric_limits<double>::quiet_NaN());
    L.error.assign(N, std::numeric_limits<double>::quiet_NaN());

    SOFR_REQUIRE(initial_wealth || options.target, DomainError,
                 "wealth simulation needs an initial wealth or a target price");
    double V = initial_wealth ? *initial_wealth : options.target(context(0));
    double account = 1.0;  // B^h_t / B^h_{t_0}
    for (std::size_t i = 0;; ++i) {
        const StrategyContext ctx = context(i);
        L.wealth[i] = V;
        L.collateral[i] = -beta * V;
        L.portfolio[i] = V + L.collateral[i];
        L.funding_units[i] = L.portfolio[i] / account;
        if (options.target) {
            L.target[i] = options.target(ctx);
            L.error[i] = V - L.target[i];
            L.max_abs_error = std::max(L.max_abs_error, std::abs(L.error[i]));
        }
        if (i + 1 == N) break;

        const HedgeRatios r = strategy(ctx);
        SOFR_REQUIRE(r.futures.size() == m, DomainError, "strategy returned the wrong number of futures positions");
        L.positions[i] = r.futures;

        const double t0 = path.times[i], t1 = path.times[i + 1];
        const double gh = account_growth(path, bh, t0, t1, options.scheme);
        const double gc = account_growth(path, bc, t0, t1, options.scheme);
        double pnl = 0.0;
        for (std::size_t k = 0; k < m; ++k) pnl += r.futures[k] * (marks[i + 1][k].price() - marks[i][k].price());
        const double fund = (1.0 - beta) * V * (gh - 1.0);
        const double coll = beta * V * (gc - 1.0);
        V = V + fund + coll + pnl;
        const double paid = options.payout ? options.payout(context(i + 1)) : 0.0;
        V -= paid;
        account *= gh;
        L.futures_pnl[i + 1] = pnl;
        L.funding_interest[i + 1] = fund;
        L.collateral_interest[i + 1] = coll;
        L.payouts[i + 1] = paid;
    }
    L.terminal_error = L.error.back();
    L.threshold_breached = options.target && L.max_abs_error > options.tracking_threshold;
    return L;
}

HedgeProgram swap_program(const MarketModel& model, const SwapSpec& spec) {
    spec.validate();
    HedgeProgram prog;
    for (std::size_t j = 1; j <= spec.tenor.periods(); ++j) prog.contracts.push_back(spec.tenor.contract(j));
    prog.beta = constant_beta(model, spec.collateral_fraction);
    prog.maturity = spec.tenor.end();
    prog.notional = spec.notional;
    SwapSpec s = spec;
    s.collateral_fraction = prog.beta;
    const BasisCurve& bs = model.basis(RateLabel::s);
    prog.strategy = [&model, s](const StrategyContext& ctx) {
        return swap_hedge(model, ctx.factor, ctx.t, s, ctx.futures);
    };
    prog.payout = [s, &bs](const StrategyContext& ctx) {
        double paid = 0.0;
        for (std::size_t j = 1; j <= s.tenor.periods(); ++j) {
            if (std::abs(ctx.t - s.tenor.dates[j]) > time_tol) continue;
            const double growth = std::exp(realized_accrual(*ctx.history, bs, s.tenor.dates[j - 1], s.tenor.dates[j]));
            paid += s.sign() * s.notional * (growth - (1.0 + s.tenor.delta(j) * s.fixed_rate));
        }
        return paid;
    };
    prog.target = [&model, s, payout = prog.payout](const StrategyContext& ctx) {
        if (ctx.t > s.tenor.end() - time_tol) return 0.0;
        return swap_price(model, ctx.factor, ctx.t, s, ctx.history) - payout(ctx);
    };
    return prog;
}

HedgeProgram caplet_program(const MarketModel& model, const FuturesContract& period, double kappa, double notional,
                            double beta) {
    period.validate();
    HedgeProgram prog;
    prog.contracts = {period};
    prog.beta = beta;
    prog.maturity = period.end();
    prog.notional = notional;
    prog.strategy = [&model, period, kappa, notional, beta](const StrategyContext& ctx) {
        return caplet_hedge(model, ctx.factor, ctx.t, period, kappa, ctx.futures[0], notional, beta);
    };
    prog.payout = [period, kappa, notional](const StrategyContext& ctx) {
        if (std::abs(ctx.t - period.end()) > time_tol) return 0.0;
        return notional * std::max(ctx.futures[0].growth() - (1.0 + period.delta * kappa), 0.0);
    };
    prog.target = [&model, period, kappa, notional, beta](const StrategyContext& ctx) {
        if (ctx.t > period.end() - time_tol) return 0.0;
        return caplet_price(model, ctx.factor, ctx.t, period, kappa, ctx.futures[0], notional, beta);
    };
    return prog;
}

WealthLedger run_hedge(const MarketModel& model, const RatePath& path, const HedgeProgram& program,
                       IntegrationScheme scheme, double tracking_threshold) {
    WealthOptions opt;
    opt.scheme = scheme;
    opt.target = program.target;
    opt.payout = program.payout;
    opt.tracking_threshold = tracking_threshold * program.notional;
    return simulate_wealth(model, path, program.strategy, program.contracts, program.beta, std::nullopt, opt);
}

double refinement_slope(std::span<const double> dts, std::span<const double> errors) {
    SOFR_REQUIRE(dts.size() == errors.size() && dts.size() >= 2, DomainError,
                 "refinement slope needs at least two (dt, error) pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) {
        SOFR_REQUIRE(dts[i] > 0.0 && errors[i] > 0.0, DomainError, "refinement slope needs positive values");
        const double x = std::log(dts[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ReplicationStudy replication_study(const MarketModel& model, const HedgeProgram& program, double start,
                                   std::span<const double> step_sizes, std::size_t paths, std::uint64_t seed,
                                   IntegrationScheme scheme) {
    SOFR_REQUIRE(!step_sizes.empty() && paths >= 2, DomainError, "replication study needs step sizes and >= 2 paths");
    const double h = *std::min_element(step_sizes.begin(), step_sizes.end());
    const double span = program.maturity - start;
    const double steps_real = span / h;
    const auto n_fine = static_cast<std::size_t>(std::llround(steps_real));
    SOFR_REQUIRE(n_fine >= 1 && std::abs(steps_real - static_cast<double>(n_fine)) < 1e-6, DomainError,
                 "hedge horizon is not a whole number of the finest steps");

    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_paths = paths;
    cfg.grid.resize(n_fine + 1);
    for (std::size_t k = 0; k <= n_fine; ++k) cfg.grid[k] = start + span * static_cast<double>(k) / n_fine;
    cfg.threads = 1;
    const PathSimulator sim(model.factor, cfg);

    std::vector<std::size_t> strides;
    for (double dt : step_sizes) {
        const double r = dt / h;
        const auto m = static_cast<std::size_t>(std::llround(r));
        SOFR_REQUIRE(std::abs(r - static_cast<double>(m)) < 1e-6 && n_fine % m == 0, DomainError,
                     "step sizes must be whole multiples of the finest step dividing the horizon");
        for (const FuturesContract& c : program.contracts)
            for (double T : {c.start, c.end()}) {
                if (T <= start) continue;
                const double k = (T - start) / (h * static_cast<double>(m));
                SOFR_REQUIRE(std::abs(k - std::round(k)) < 1e-6, DomainError,
                             "contract dates must lie on every rebalancing grid");
            }
        strides.push_back(m);
    }

    ReplicationStudy out;
    out.points.resize(step_sizes.size());
    RatePath fine, coarse;
    for (std::size_t p = 0; p < paths; ++p) {
        sim.fill(p, fine);
        for (std::size_t s = 0; s < strides.size(); ++s) {
            const std::size_t m = strides[s];
            coarse.times.clear();
            coarse.factor.clear();
            coarse.factor_integral.clear();
            for (std::size_t k = 0; k <= n_fine; k += m) {
                coarse.times.push_back(fine.times[k]);
                coarse.factor.push_back(fine.factor[k]);
                coarse.factor_integral.push_back(fine.factor_integral[k]);
            }
            const WealthLedger L = run_hedge(model, coarse, program, scheme);
            out.points[s].mean_abs_terminal_error += std::abs(L.terminal_error);
            out.points[s].mean_max_abs_error += L.max_abs_error;
        }
    }
    std::vector<double> dts, errs;
    for (std::size_t s = 0; s < strides.size(); ++s) {
        auto& pt = out.points[s];
        pt.dt = step_sizes[s];
        pt.paths = paths;
        pt.mean_abs_terminal_error /= static_cast<double>(paths);
        pt.mean_max_abs_error /= static_cast<double>(paths);
        dts.push_back(pt.dt);
        errs.push_back(pt.mean_abs_terminal_error);
    }
    if (dts.size() >= 2) out.slope = refinement_slope(dts, errs);
    return out;
}

}  // namespace sofr

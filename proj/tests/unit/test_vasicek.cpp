#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "../support.hpp"
#include "sofr/errors.hpp"
#include "sofr/mc.hpp"
#include "sofr/vasicek.hpp"

using namespace sofr;
using sofr::test::adaptive;

namespace {

// Everything below is integrated numerically from the factor dynamics
// dx = (a - b x) dt + sigma dW, independent of the closed forms under test.
double n_direct(double t, double T, double b) {
    return adaptive([&](double u) { return std::exp(-b * (u - t)); }, t, T, 0);
}

double m_direct(double t, double T, const FactorParams& p) {
    auto n = [&](double u) { return n_direct(u, T, p.b); };
    return 0.5 * p.sigma * p.sigma * adaptive([&](double u) { return n(u) * n(u); }, t, T) - p.a * adaptive(n, t, T);
}

double mean_x(double x, double t, double u, const FactorParams& p) {
    return x * std::exp(-p.b * (u - t)) + p.a * n_direct(t, u, p.b);
}

// sensitivity of int_T^U x to dW_s
double load(double s, double T, double U, double b) {
    return s < T ? std::exp(-b * (T - s)) * n_direct(T, U, b) : n_direct(s, U, b);
}

FactorParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ua(-0.02, 0.05), ub(0.0, 1.5), us(0.001, 0.03), ux(-0.02, 0.08);
    return {ua(rng), ub(rng), us(rng), ux(rng)};
}

}  // namespace

TEST_SUITE("vasicek") {

TEST_CASE("n factor values and limits") {
    CHECK(n_factor(1.0, 1.0, 0.3) == 0.0);
    CHECK(n_factor(0.0, 2.0, 0.0) == 2.0);
    CHECK(n_factor(0.0, 2.0, 1e-300) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(n_factor(0.0, 2.0, 0.5) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-15));
    CHECK(n_factor(0.0, 2.0, 0.5) == doctest::Approx(1.264241).epsilon(1e-6));
    CHECK_THROWS_AS(n_factor(2.0, 1.0, 0.3), DomainError);
}

TEST_CASE("n factor is nondecreasing in T and bounded by the horizon") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 10.0), ub(0.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double t = u(rng), tau = u(rng), b = ub(rng);
        const double n = n_factor(t, t + tau, b);
        CHECK(n >= 0.0);
        CHECK(n <= tau * (1 + 1e-15));
        CHECK(n_factor(t, t + tau + 0.01, b) >= n);
    }
}

TEST_CASE("kernels against quadrature across the series switch") {
    for (double b : {0.0, 1e-9, 1e-4, 0.01, 0.2, 0.45, 0.55, 1.0, 3.0}) {
        for (double tau : {0.05, 0.5, 1.0, 2.0}) {
            CAPTURE(b);
            CAPTURE(tau);
            CHECK(n_factor(0.0, tau, b) == doctest::Approx(n_direct(0.0, tau, b)).epsilon(1e-13));
            CHECK(n_integral(0.0, tau, b) ==
                  doctest::Approx(adaptive([&](double u) { return n_direct(u, tau, b); }, 0.0, tau)).epsilon(1e-12));
            CHECK(n_squared_integral(0.0, tau, b) ==
                  doctest::Approx(adaptive([&](double u) { double n = n_direct(u, tau, b); return n * n; }, 0.0, tau))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("m factor") {
    CHECK(m_factor(1.0, 1.0, {0.02, 0.3, 0.01, 0.0}) == 0.0);
    CHECK(m_factor(0.0, 5.0, {0.0, 0.3, 0.0, 0.0}) == 0.0);
    const FactorParams p{0.02, 0.5, 0.01, 0.0};
    CHECK(std::abs(m_factor(0.0, 2.0, p) - m_direct(0.0, 2.0, p)) <= 1e-12);
    CHECK(std::abs(m_factor(1.3, 3.3, p) - m_direct(1.3, 3.3, p)) <= 1e-12);
    CHECK_THROWS_AS(m_factor(2.0, 1.0, p), DomainError);
}

TEST_CASE("bond kernel") {
    const FactorParams p{0.02, 0.3, 0.01, 0.03};
    const BasisCurve zero = BasisCurve::constant(0.0, RateLabel::s);
    CHECK(zcb_kernel(0.07, 2.0, 2.0, p, zero) == 1.0);
    const FactorParams det{0.0, 0.3, 0.0, 0.0};
    CHECK(zcb_kernel(0.04, 0.0, 3.0, det, zero) == doctest::Approx(std::exp(-n_factor(0.0, 3.0, 0.3) * 0.04)).epsilon(1e-15));
    const FactorParams flat{0.0, 0.0, 0.0, 0.0};
    CHECK(zcb_kernel(0.04, 0.0, 3.0, flat, zero) == doctest::Approx(std::exp(-0.12)).epsilon(1e-15));
    // log-derivative in x is -n(t,T)
    const BasisCurve s = BasisCurve::constant(-0.0005, RateLabel::s);
    const double h = 1e-5;
    const double d = (std::log(zcb_kernel(0.03 + h, 0.5, 2.5, p, s)) - std::log(zcb_kernel(0.03 - h, 0.5, 2.5, p, s))) / (2 * h);
    CHECK(d == doctest::Approx(-n_factor(0.5, 2.5, p.b)).epsilon(1e-8));
}

TEST_CASE("bond kernel matches simulation") {
    const FactorParams p{0.02, 0.3, 0.01, 0.03};
    MarketModel m = test::reference_model();
    SimConfig cfg;
    cfg.seed = 42;
    cfg.n_paths = 100000;
    cfg.grid = {0.0, 2.0};
    const auto est = mc_price(m, cfg, [](const RatePath&) { return std::vector<CashFlow>{{2.0, 1.0}}; },
                              Discount::rate(RateLabel::u));
    const double closed = zcb_kernel(0.03, 0.0, 2.0, p, m.basis(RateLabel::u));
    CHECK(std::abs(est.z_score(closed)) <= 3.0);
}

TEST_CASE("tower property of the bond kernel") {
    const MarketModel m = test::reference_model();
    const BasisCurve& bs = m.basis(RateLabel::s);
    for (auto [T, U] : {std::pair{0.5, 2.0}, std::pair{1.0, 1.5}, std::pair{2.0, 5.0}}) {
        SimConfig cfg;
        cfg.seed = 77;
        cfg.n_paths = 100000;
        cfg.grid = {0.0, T};
        const auto est = mc_price(m, cfg, [&, T = T, U = U](const RatePath& path) {
            return std::vector<CashFlow>{{T, zcb_kernel(path.factor.back(), T, U, m.factor, bs)}};
        }, Discount::rate(RateLabel::s));
        CHECK(std::abs(est.z_score(zcb_kernel(m.factor.x0, 0.0, U, m.factor, bs))) <= 3.0);
    }
}

TEST_CASE("integrated factor law against quadrature") {
    const FactorParams p{0.02, 0.3, 0.012, 0.03};
    const double x = 0.027, t = 0.2, T = 0.9, U = 1.4;
    const IntegratedFactorLaw L = integrated_factor_law(x, t, T, U, p);
    const double s2 = p.sigma * p.sigma;
    CHECK(L.mean == doctest::Approx(adaptive([&](double u) { return mean_x(x, t, u, p); }, T, U)).epsilon(1e-12));
    CHECK(L.variance ==
          doctest::Approx(s2 * adaptive([&](double s) { double l = load(s, T, U, p.b); return l * l; }, t, U)).epsilon(1e-11));
    CHECK(L.state_mean == doctest::Approx(mean_x(x, t, U, p)).epsilon(1e-13));
    CHECK(L.state_variance ==
          doctest::Approx(s2 * adaptive([&](double s) { return std::exp(-2 * p.b * (U - s)); }, t, U)).epsilon(1e-12));
    CHECK(L.covariance ==
          doctest::Approx(s2 * adaptive([&](double s) { return std::exp(-p.b * (U - s)) * load(s, T, U, p.b); }, t, U))
              .epsilon(1e-11));
}

TEST_CASE("integrated factor law degenerate cases and ordering") {
    const FactorParams p{0.02, 0.3, 0.01, 0.03};
    const IntegratedFactorLaw same = integrated_factor_law(0.03, 0.0, 1.0, 1.0, p);
    CHECK(same.mean == 0.0);
    CHECK(same.variance == 0.0);
    const FactorParams det{0.02, 0.3, 0.0, 0.03};
    const IntegratedFactorLaw d = integrated_factor_law(0.03, 0.0, 0.5, 1.5, det);
    CHECK(d.variance == 0.0);
    CHECK(d.mean == doctest::Approx(adaptive([&](double u) { return mean_x(0.03, 0.0, u, det); }, 0.5, 1.5)).epsilon(1e-13));
    CHECK_THROWS_AS(integrated_factor_law(0.03, 1.0, 0.5, 1.5, p), DomainError);
    CHECK_THROWS_AS(integrated_factor_law(0.03, 0.0, 1.5, 0.5, p), DomainError);
}

TEST_CASE("integrated factor law matches exact-transition simulation") {
    const FactorParams p{0.02, 0.3, 0.01, 0.03};
    const double T = 0.75, U = 1.25;
    SimConfig cfg;
    cfg.seed = 2024;
    cfg.n_paths = 1000000;
    cfg.grid = {0.0, T, U};
    const PathSimulator sim(p, cfg);
    RatePath path;
    double s_i = 0, s_ii = 0, s_x = 0, s_xx = 0, s_ix = 0;
    for (std::size_t k = 0; k < cfg.n_paths; ++k) {
        sim.fill(k, path);
        const double I = path.factor_integral[2] - path.factor_integral[1], xu = path.factor[2];
        s_i += I;
        s_ii += I * I;
        s_x += xu;
        s_xx += xu * xu;
        s_ix += I * xu;
    }
    const double n = static_cast<double>(cfg.n_paths);
    const double mi = s_i / n, vi = s_ii / n - mi * mi, mx = s_x / n, vx = s_xx / n - mx * mx, c = s_ix / n - mi * mx;
    const IntegratedFactorLaw L = integrated_factor_law(p.x0, 0.0, T, U, p);
    CHECK(std::abs(mi - L.mean) <= 3 * std::sqrt(L.variance / n));
    CHECK(std::abs(mx - L.state_mean) <= 3 * std::sqrt(L.state_variance / n));
    // variance of a sample variance of a Gaussian: 2 sigma^4 / n
    CHECK(std::abs(vi - L.variance) <= 3 * L.variance * std::sqrt(2.0 / n));
    CHECK(std::abs(vx - L.state_variance) <= 3 * L.state_variance * std::sqrt(2.0 / n));
    CHECK(std::abs(c - L.covariance) <= 3 * std::sqrt((L.variance * L.state_variance + L.covariance * L.covariance) / n));
}

TEST_CASE("covariance matrix is positive definite") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const FactorParams p = random_params(rng);
        const double t = u(rng), T = t + u(rng), U = T + u(rng);
        const Eigen::LLT<Eigen::Matrix2d> llt(integrated_factor_law(p.x0, t, T, U, p).covariance_matrix());
        failures += llt.info() != Eigen::Success;
    }
    CHECK(failures == 0);
}

TEST_CASE("b continuity: b = 1e-12 agrees with b = 0") {
    FactorParams p0{0.02, 0.0, 0.01, 0.03}, p1 = p0;
    p1.b = 1e-12;
    const BasisCurve s = BasisCurve::constant(-0.0005, RateLabel::s);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
    CHECK(rel(m_factor(0.3, 2.3, p0), m_factor(0.3, 2.3, p1)) <= 1e-8);
    CHECK(rel(zcb_kernel(0.03, 0.3, 2.3, p0, s), zcb_kernel(0.03, 0.3, 2.3, p1, s)) <= 1e-8);
    const auto a = integrated_factor_law(0.03, 0.1, 0.6, 0.85, p0), b = integrated_factor_law(0.03, 0.1, 0.6, 0.85, p1);
    CHECK(rel(a.mean, b.mean) <= 1e-8);
    CHECK(rel(a.variance, b.variance) <= 1e-8);
    CHECK(rel(a.covariance, b.covariance) <= 1e-8);
    CHECK(rel(factor_variance(0.0, 3.0, p0), factor_variance(0.0, 3.0, p1)) <= 1e-8);
}

}  // TEST_SUITE

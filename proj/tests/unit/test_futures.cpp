#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "../support.hpp"
#include "sofr/calendar.hpp"
#include "sofr/errors.hpp"
#include "sofr/futures.hpp"
#include "sofr/mc.hpp"

using namespace sofr;
using sofr::test::adaptive;

namespace {

const FuturesContract sfr3{0.5, 0.25, FuturesStyle::ThreeMonthCompound};

// MC of the terminal compound SOFR rate seen from (t, x_t) with `accrued` already realized.
McEstimate terminal_rate_mc(MarketModel m, double x_t, double t, const FuturesContract& c, double accrued,
                            std::uint64_t seed) {
    m.factor.x0 = x_t;
    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_paths = 200000;
    const double from = std::max(t, c.start);
    cfg.grid = t < c.start ? std::vector<double>{t, c.start, c.end()} : std::vector<double>{t, c.end()};
    const BasisCurve& s = m.basis(RateLabel::s);
    return mc_price(m, cfg, [&](const RatePath& p) {
        const double g = std::exp(accrued + p.integral(from, c.end()) + s.integral(from, c.end()));
        return std::vector<CashFlow>{{c.end(), (g - 1.0) / c.delta}};
    });
}

}  // namespace

TEST_SUITE("futures") {

TEST_CASE("deterministic rates collapse to simple compounding") {
    MarketModel m;
    m.factor = {0.0, 0.0, 0.0, 0.031};
    for (double t : {0.0, 0.2, 0.5}) {
        CHECK(futures_rate(m, 0.031, t, sfr3) == doctest::Approx(std::expm1(0.031 * 0.25) / 0.25).epsilon(1e-14));
    }
    // with a nonzero speed, the deterministic path is the ODE solution
    m.factor = {0.02, 0.4, 0.0, 0.031};
    m.set_basis(RateLabel::s, PiecewiseConstant(-0.0005));
    const double I = adaptive([&](double u) { return 0.031 * std::exp(-0.4 * u) + 0.02 * (1 - std::exp(-0.4 * u)) / 0.4 - 0.0005; },
                              sfr3.start, sfr3.end());
    CHECK(futures_rate(m, 0.031, 0.0, sfr3) == doctest::Approx(std::expm1(I) / 0.25).epsilon(1e-13));
}

TEST_CASE("settlement: the futures rate at T + delta is the realized compound rate") {
    const MarketModel m = test::reference_model();
    const double acc = 0.0078;
    CHECK(futures_rate(m, 0.04, sfr3.end(), sfr3, acc) == doctest::Approx(std::expm1(acc) / 0.25).epsilon(1e-15));
}

TEST_CASE("futures rate matches simulation before and inside the period") {
    const MarketModel m = test::reference_model();
    const auto pre = terminal_rate_mc(m, m.factor.x0, 0.0, sfr3, 0.0, 101);
    CHECK(std::abs(pre.z_score(futures_rate(m, m.factor.x0, 0.0, sfr3))) <= 3.0);
    const auto mid = terminal_rate_mc(m, 0.028, 0.3, sfr3, 0.0, 102);
    CHECK(std::abs(mid.z_score(futures_rate(m, 0.028, 0.3, sfr3))) <= 3.0);
    const double acc = 0.0032;
    const auto in = terminal_rate_mc(m, 0.033, 0.6, sfr3, acc, 103);
    CHECK(std::abs(in.z_score(futures_rate(m, 0.033, 0.6, sfr3, acc))) <= 3.0);
}

TEST_CASE("monotone in the factor before T and in the accrual inside") {
    const MarketModel m = test::reference_model();
    for (double x = -0.02; x < 0.08; x += 0.01) CHECK(futures_rate(m, x + 0.001, 0.2, sfr3) > futures_rate(m, x, 0.2, sfr3));
    for (double a = 0.0; a < 0.01; a += 0.001)
        CHECK(futures_rate(m, 0.03, 0.6, sfr3, a + 1e-4) > futures_rate(m, 0.03, 0.6, sfr3, a));
}

TEST_CASE("errors") {
    const MarketModel m = test::reference_model();
    CHECK_THROWS_AS(futures_rate(m, 0.03, 0.6, sfr3), MissingHistoryError);
    CHECK_THROWS_AS(futures_rate(m, 0.03, 0.8, sfr3, 0.0), DomainError);
    CHECK_THROWS_AS(accumulated_variance(sfr3, 0.4, 0.3, m.factor), DomainError);
    CHECK_THROWS_AS(accumulated_variance(sfr3, 0.4, 0.9, m.factor), DomainError);
    CHECK_THROWS_AS(futures_rate(m, 0.03, 0.0, FuturesContract{0.5, 0.0}), DomainError);
    const std::vector<FuturesContract> strip{sfr3};
    CHECK_THROWS_AS(futures_strip(m, 0.03, 0.6, strip), MissingHistoryError);
}

TEST_CASE("futures volatility") {
    const FactorParams p{0.02, 0.3, 0.01, 0.03};
    CHECK(futures_vol(sfr3, sfr3.end(), p) == 0.0);
    CHECK(futures_vol(sfr3, sfr3.start, p) == doctest::Approx(futures_vol(sfr3, sfr3.start + 1e-14, p)).epsilon(1e-12));
    const FactorParams flat{0.02, 0.0, 0.01, 0.03};
    for (double t : {0.0, 0.3, 0.5}) CHECK(futures_vol(sfr3, t, flat) == doctest::Approx(0.01 * 0.25).epsilon(1e-15));
}

TEST_CASE("accumulated variance against quadrature of the squared volatility") {
    const FactorParams p{0.02, 0.3, 0.01, 0.03};
    auto sq = [&](double u) { double v = futures_vol(sfr3, u, p); return v * v; };
    CHECK(accumulated_variance(sfr3, sfr3.end(), sfr3.end(), p) == 0.0);
    CHECK(accumulated_variance(sfr3, 0.0, sfr3.end(), FactorParams{0.02, 0.3, 0.0, 0.03}) == 0.0);
    for (auto [t, h] : {std::pair{0.0, 0.75}, std::pair{0.1, 0.4}, std::pair{0.2, 0.6}, std::pair{0.55, 0.75}, std::pair{0.6, 0.7}}) {
        CAPTURE(t);
        CAPTURE(h);
        const double q = t < sfr3.start && h > sfr3.start ? adaptive(sq, t, sfr3.start) + adaptive(sq, sfr3.start, h)
                                                          : adaptive(sq, t, h);
        CHECK(std::abs(accumulated_variance(sfr3, t, h, p) - q) <= 1e-12 * std::max(q, 1e-6));
    }
    // the variance to settlement is the variance of the log growth
    const IntegratedFactorLaw law = integrated_factor_law(0.03, 0.1, sfr3.start, sfr3.end(), p);
    CHECK(accumulated_variance(sfr3, 0.1, sfr3.end(), p) == doctest::Approx(law.variance).epsilon(1e-12));
}

TEST_CASE("convexity: futures rate exceeds the forward rate when rates are random") {
    const MarketModel m = test::reference_model();
    CHECK(convexity_adjustment(m, 0.03, 0.0, sfr3) > 0.0);
    CHECK(convexity_adjustment(m, 0.03, 0.0, FuturesContract{3.0, 0.25}) > convexity_adjustment(m, 0.03, 0.0, sfr3));
    MarketModel det = m;
    det.factor.sigma = 0.0;
    CHECK(std::abs(convexity_adjustment(det, 0.03, 0.0, sfr3)) <= 1e-15);
    CHECK(convexity_adjustment(m, 0.03, sfr3.end(), sfr3, 0.008) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("strip") {
    const MarketModel m = test::reference_model();
    std::vector<FuturesContract> c;
    for (int k = 0; k < 8; ++k) c.push_back({0.25 * (k + 1), 0.25});
    const auto rows = futures_strip(m, 0.03, 0.0, c);
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) {
        CHECK(r.price == doctest::Approx(1.0 - r.rate).epsilon(1e-15));
        CHECK(r.convexity > 0.0);
    }
}

TEST_CASE("settlement display price golden file") {
    std::ifstream in(SOFR_SOURCE_DIR "/tests/data/settlement_display.csv");
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string rate, price;
        std::getline(ss, rate, ',');
        std::getline(ss, price);
        CAPTURE(line);
        CHECK(settlement_display_price(std::stod(rate)) == doctest::Approx(std::stod(price)).epsilon(1e-15));
        // per unit notional: one minus the rate rounded to a tenth of a basis point
        CHECK(1.0 - round_to_tenth_bp(std::stod(rate)) == doctest::Approx(std::stod(price) / 100.0).epsilon(1e-15));
        ++rows;
    }
    CHECK(rows == 20);
}

}  // TEST_SUITE
